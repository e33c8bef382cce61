// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptalign/scene_parser.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "promptalign/text_util.hpp"

namespace promptalign::grammar {

namespace {

std::vector<std::string> Words(std::string_view phrase) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : phrase) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// Multi-word phrase lookup keyed on the first word; longest match wins.
template <typename V>
class PhraseTable {
 public:
  void Add(std::string_view phrase, V value) {
    auto words = Words(phrase);
    auto& bucket = by_first_[words.front()];
    bucket.push_back({std::move(words), std::move(value)});
  }

  struct Hit {
    std::size_t length = 0;
    const V* value = nullptr;
    explicit operator bool() const { return value != nullptr; }
  };

  Hit Match(const std::vector<std::string>& seq, std::size_t i) const {
    Hit best;
    auto it = by_first_.find(seq[i]);
    if (it == by_first_.end()) return best;
    for (const auto& e : it->second) {
      const auto n = e.words.size();
      if (n <= best.length || i + n > seq.size()) continue;
      if (std::equal(e.words.begin(), e.words.end(), seq.begin() + i)) {
        best = {n, &e.value};
      }
    }
    return best;
  }

 private:
  struct Entry {
    std::vector<std::string> words;
    V value;
  };
  std::unordered_map<std::string, std::vector<Entry>> by_first_;
};

enum class AttrKind { kColor, kSize, kMaterial, kExpression };

struct RelationTrigger {
  RelationKind kind;
  std::string detail;
  bool reversed = false;  // "X inside Y": Y is the subject
};

struct KnowledgeEntry {
  std::string canonical;
  ActorKind kind;
};

struct VerbEntry {
  std::string lemma;
  VerbClass cls;
};

struct Lexicon {
  PhraseTable<ActorKind> nouns;  // singular forms
  std::unordered_map<std::string, ActorKind> noun_kind;
  PhraseTable<std::string> wearables;
  PhraseTable<std::pair<AttrKind, std::string>> adjectives;
  std::set<std::string> materials;
  PhraseTable<std::string> styles;
  PhraseTable<KnowledgeEntry> knowledge;
  PhraseTable<bool> counterfactual;
  PhraseTable<std::string> positions;
  PhraseTable<RelationTrigger> relations;
  PhraseTable<bool> negations;  // value: explicit
  std::set<std::string> comparatives;
  std::unordered_map<std::string, int> numbers;
  std::set<std::string> vague;
  std::set<std::string> pronouns;
  std::unordered_map<std::string, VerbEntry> verbs;
  std::unordered_map<std::string, VerbClass> verb_class;
  std::vector<std::string> position_names;
};

void AddVerb(Lexicon& lx, const std::string& lemma, VerbClass cls, bool double_final,
             std::initializer_list<const char*> extra) {
  lx.verb_class[lemma] = cls;
  auto put = [&](const std::string& form) { lx.verbs.emplace(form, VerbEntry{lemma, cls}); };
  put(lemma);
  const char last = lemma.back();
  const bool ends_e = last == 'e' && !lemma.ends_with("ee");
  const bool consonant_y =
      last == 'y' && lemma.size() > 1 &&
      std::string_view("aeiou").find(lemma[lemma.size() - 2]) == std::string_view::npos;
  // Third person.
  if (consonant_y) {
    put(lemma.substr(0, lemma.size() - 1) + "ies");
  } else if (lemma.ends_with("s") || lemma.ends_with("sh") || lemma.ends_with("ch") ||
             lemma.ends_with("x") || lemma.ends_with("z") || lemma.ends_with("o")) {
    put(lemma + "es");
  } else {
    put(lemma + "s");
  }
  // Progressive and past.
  const std::string stem = double_final ? lemma + last : lemma;
  if (lemma.ends_with("ie")) {
    put(lemma.substr(0, lemma.size() - 2) + "ying");
  } else if (ends_e) {
    put(lemma.substr(0, lemma.size() - 1) + "ing");
  } else {
    put(stem + "ing");
  }
  if (ends_e || lemma.ends_with("ee")) {
    put(lemma + "d");
  } else if (consonant_y) {
    put(lemma.substr(0, lemma.size() - 1) + "ied");
  } else {
    put(stem + "ed");
  }
  for (const char* form : extra) put(form);
}

Lexicon BuildLexicon() {
  Lexicon lx;
  auto noun = [&](ActorKind k, std::initializer_list<const char*> names) {
    for (const char* n : names) {
      lx.nouns.Add(n, k);
      lx.noun_kind[n] = k;
    }
  };
  noun(ActorKind::kHuman,
       {"man", "woman", "girl", "boy", "person", "child", "baby", "boxer", "dancer",
        "chef", "soldier", "king", "queen", "knight", "astronaut", "doctor", "teacher",
        "student", "farmer", "musician", "athlete", "gymnast", "skater", "warrior",
        "princess", "prince", "wizard", "samurai", "monk", "worker", "pilot",
        "firefighter", "painter", "singer", "guitarist", "old man", "old woman",
        "little girl", "little boy", "grandmother", "grandfather", "detective", "nurse"});
  noun(ActorKind::kAnimal,
       {"dog", "cat", "puppy", "kitten", "horse", "eagle", "bird", "fox", "wolf",
        "bear", "lion", "tiger", "rabbit", "deer", "elephant", "owl", "fish",
        "dolphin", "whale", "panda", "monkey", "cow", "sheep", "duck", "goose",
        "butterfly", "dragon", "unicorn", "squirrel", "penguin", "parrot", "frog",
        "snake", "turtle", "koala", "giraffe", "zebra", "mouse", "hamster", "polar bear"});
  noun(ActorKind::kHand, {"hand", "finger"});
  noun(ActorKind::kObject,
       {"bowl", "beef noodle", "noodle", "scallion", "ball", "table", "chair", "cup",
        "soda water", "guitar", "car", "race car", "track", "city track", "mini-map",
        "map", "poster", "throne", "chopstick", "food", "punching bag", "sphere",
        "cube", "sculpture", "orange slice", "apple", "book", "lamp", "vase", "clock",
        "bottle", "box", "bag", "umbrella", "bicycle", "boat", "ship", "train",
        "plane", "house", "building", "tower", "bridge", "castle", "window", "door",
        "bed", "sofa", "desk", "computer", "phone", "camera", "candle", "teapot",
        "cake", "pizza", "burger", "bread", "sword", "shield", "crown", "kite",
        "balloon", "piano", "violin", "drum", "robot", "statue", "stem", "sign",
        "banner", "wall", "road", "street", "room", "kitchen", "screen", "mug",
        "plate", "spoon", "fork", "knife", "pencil", "brush", "egg", "coffee",
        "sandwich", "lantern", "mirror", "key", "ring", "basket", "rope", "ladder"});
  noun(ActorKind::kNature,
       {"wind", "cherry blossom", "blossom", "tree", "flower", "cloud", "mountain",
        "river", "sea", "ocean", "sky", "sun", "moon", "star", "rain", "snow",
        "leaf", "grass", "wave", "fire", "smoke", "forest", "desert", "field",
        "beach", "island", "waterfall", "lake", "sunset", "dandelion", "water",
        "petal", "storm", "lightning", "volcano", "fog"});

  for (const char* w : {"shirt", "dress", "clothe", "clothing", "hat", "coat", "jacket",
                        "skirt", "scarf", "shoe", "boot", "glove", "sweater", "suit",
                        "uniform", "hoodie", "cape", "robe", "expression", "face", "hair",
                        "eye", "buzz cut", "long hair", "short hair", "outfit", "tie"}) {
    lx.wearables.Add(w, w);
  }

  auto adj = [&](AttrKind k, std::initializer_list<std::pair<const char*, const char*>> items) {
    for (const auto& [surface, canonical] : items) lx.adjectives.Add(surface, {k, canonical});
  };
  adj(AttrKind::kColor,
      {{"red", "red"}, {"blue", "blue"}, {"yellow", "yellow"}, {"green", "green"},
       {"orange", "orange"}, {"purple", "purple"}, {"pink", "pink"}, {"black", "black"},
       {"white", "white"}, {"gray", "gray"}, {"grey", "gray"}, {"brown", "brown"},
       {"golden", "golden"}, {"cyan", "cyan"}, {"teal", "teal"}, {"beige", "beige"},
       {"crimson", "crimson"}, {"navy", "navy"}, {"violet", "violet"}});
  adj(AttrKind::kSize,
      {{"large", "large"}, {"small", "small"}, {"big", "big"}, {"tiny", "tiny"},
       {"huge", "huge"}, {"giant", "giant"}, {"enormous", "enormous"},
       {"miniature", "miniature"}, {"massive", "massive"}, {"little", "little"}});
  const std::initializer_list<std::pair<const char*, const char*>> materials = {
      {"ice", "ice"},         {"wood", "wood"},       {"wooden", "wood"},
      {"glass", "glass"},     {"metal", "metal"},     {"metallic", "metal"},
      {"stone", "stone"},     {"gold", "gold"},       {"silver", "silver"},
      {"marble", "marble"},   {"paper", "paper"},     {"plastic", "plastic"},
      {"steel", "steel"},     {"iron", "iron"},       {"bronze", "bronze"},
      {"clay", "clay"},       {"porcelain", "porcelain"}, {"crystal", "crystal"},
      {"leather", "leather"}, {"wool", "wool"},       {"copper", "copper"},
      {"woolen", "wool"},     {"jade", "jade"}};
  adj(AttrKind::kMaterial, materials);
  for (const auto& m : materials) lx.materials.insert(m.first);
  adj(AttrKind::kExpression,
      {{"contemptuous", "contemptuous"}, {"happy", "happy"}, {"sad", "sad"},
       {"angry", "angry"}, {"smiling", "smiling"}, {"surprised", "surprised"},
       {"fearful", "fearful"}, {"scared", "scared"}, {"joyful", "joyful"},
       {"crying", "crying"}, {"laughing", "laughing"}, {"serious", "serious"},
       {"disgusted", "disgusted"}, {"calm", "calm"}, {"worried", "worried"},
       {"excited", "excited"}, {"confused", "confused"}, {"proud", "proud"},
       {"grumpy", "grumpy"}, {"shy", "shy"}});

  for (const char* s : {"chinese ink wash", "ink wash", "oil painting", "watercolor",
                        "pixel art", "ukiyo-e", "anime", "cyberpunk", "impressionist",
                        "pencil sketch", "art deco", "baroque", "low poly", "pop art",
                        "charcoal sketch", "vaporwave", "photorealistic", "cartoon",
                        "comic book", "studio ghibli", "line art", "papercut"}) {
    lx.styles.Add(s, s);
  }

  auto know = [&](ActorKind k, std::initializer_list<std::pair<const char*, const char*>> items) {
    for (const auto& [surface, canonical] : items) {
      lx.knowledge.Add(surface, {canonical, k});
      lx.noun_kind[canonical] = k;
    }
  };
  know(ActorKind::kHuman,
       {{"marie curie", "marie curie"}, {"einstein", "einstein"},
        {"albert einstein", "einstein"}, {"hawking", "hawking"},
        {"stephen hawking", "hawking"}, {"van gogh", "van gogh"},
        {"napoleon", "napoleon"}, {"mona lisa", "mona lisa"}});
  know(ActorKind::kObject,
       {{"great wall of china", "great wall of china"},
        {"great wall", "great wall of china"}, {"eiffel tower", "eiffel tower"},
        {"statue of liberty", "statue of liberty"}, {"mount fuji", "mount fuji"},
        {"taj mahal", "taj mahal"}, {"big ben", "big ben"},
        {"golden gate bridge", "golden gate bridge"},
        {"sydney opera house", "sydney opera house"}, {"colosseum", "colosseum"},
        {"forbidden city", "forbidden city"}});

  for (const char* c : {"suspended above", "suspended in", "floating above",
                        "floating in the sky", "upside down", "upside-down",
                        "walking on water", "on the moon", "defying gravity",
                        "underwater city", "flying whale", "melting clock",
                        "raining upward", "sky below"}) {
    lx.counterfactual.Add(c, true);
  }

  const std::vector<std::pair<std::string, std::vector<std::string>>> positions = {
      {"top-left", {"top-left", "top left", "upper left", "upper-left"}},
      {"top-right", {"top-right", "top right", "upper right", "upper-right"}},
      {"bottom-left", {"bottom-left", "bottom left", "lower left", "lower-left"}},
      {"bottom-right", {"bottom-right", "bottom right", "lower right", "lower-right"}},
      {"top", {"top"}},
      {"bottom", {"bottom"}},
      {"left", {"left"}},
      {"right", {"right"}},
      {"center", {"center", "centre", "middle"}},
  };
  for (const auto& [canonical, bases] : positions) {
    lx.position_names.push_back(canonical);
    for (const auto& base : bases) {
      const bool single = base.find_first_of(" -") == std::string::npos;
      for (const char* prefix : {"", "in the ", "at the ", "on the "}) {
        if (single && prefix[0] == '\0') continue;
        for (const char* suffix : {"", " corner", " side", " edge"}) {
          lx.positions.Add(std::string(prefix) + base + suffix, canonical);
        }
      }
    }
  }

  auto rel = [&](RelationKind k, std::initializer_list<const char*> phrases,
                 bool reversed = false) {
    for (const char* p : phrases) lx.relations.Add(p, {k, p, reversed});
  };
  rel(RelationKind::kComposition,
      {"made of", "made from", "composed of", "built from", "formed from", "formed of"});
  rel(RelationKind::kContainment, {"full of", "filled with", "containing"});
  rel(RelationKind::kContainment, {"inside", "within", "in a", "in the"}, true);
  rel(RelationKind::kSimilarity,
      {"shaped like", "in the shape of", "resembling", "resembles", "looks like",
       "looking like", "look like"});
  rel(RelationKind::kSpatial,
      {"on top of", "on", "above", "below", "under", "beneath", "next to", "beside",
       "behind", "in front of", "left of", "to the left of", "right of",
       "to the right of", "near"});

  lx.negations.Add("no", false);
  lx.negations.Add("without", false);
  lx.negations.Add("absolutely no", true);
  lx.negations.Add("without any", true);
  lx.negations.Add("strictly no", true);

  for (const char* c : {"taller", "shorter", "bigger", "smaller", "larger", "older",
                        "younger", "longer", "wider", "heavier", "brighter", "higher"}) {
    lx.comparatives.insert(c);
  }
  const char* number_words[] = {"one",     "two",     "three",     "four",     "five",
                                "six",     "seven",   "eight",     "nine",     "ten",
                                "eleven",  "twelve",  "thirteen",  "fourteen", "fifteen",
                                "sixteen", "seventeen", "eighteen", "nineteen", "twenty"};
  for (int i = 0; i < 20; ++i) lx.numbers[number_words[i]] = i + 1;
  lx.numbers["both"] = 2;
  lx.numbers["single"] = 1;
  for (const char* v : {"some", "several", "many", "few", "numerous", "multiple",
                        "various", "countless"}) {
    lx.vague.insert(v);
  }
  for (const char* p : {"it", "they", "he", "she"}) lx.pronouns.insert(p);

  using VC = VerbClass;
  AddVerb(lx, "run", VC::kBody, true, {"ran"});
  AddVerb(lx, "jump", VC::kBody, false, {});
  AddVerb(lx, "dance", VC::kBody, false, {});
  AddVerb(lx, "perform", VC::kBody, false, {});
  AddVerb(lx, "flip", VC::kBody, true, {});
  AddVerb(lx, "swim", VC::kBody, true, {"swam"});
  AddVerb(lx, "gallop", VC::kBody, false, {});
  AddVerb(lx, "climb", VC::kBody, false, {});
  AddVerb(lx, "skate", VC::kBody, false, {});
  AddVerb(lx, "leap", VC::kBody, false, {"leapt"});
  AddVerb(lx, "kneel", VC::kBody, false, {"knelt"});
  AddVerb(lx, "stretch", VC::kBody, false, {});
  AddVerb(lx, "spin", VC::kBody, true, {"spun"});
  AddVerb(lx, "crouch", VC::kBody, false, {});
  AddVerb(lx, "sprint", VC::kBody, false, {});
  AddVerb(lx, "walk", VC::kBody, false, {});
  AddVerb(lx, "somersault", VC::kBody, false, {});
  AddVerb(lx, "bow", VC::kBody, false, {});
  AddVerb(lx, "use", VC::kHand, false, {});
  AddVerb(lx, "hold", VC::kHand, false, {"held"});
  AddVerb(lx, "pick", VC::kHand, false, {});
  AddVerb(lx, "write", VC::kHand, false, {"wrote", "written"});
  AddVerb(lx, "play", VC::kHand, false, {});
  AddVerb(lx, "grab", VC::kHand, true, {});
  AddVerb(lx, "pour", VC::kHand, false, {});
  AddVerb(lx, "knit", VC::kHand, true, {});
  AddVerb(lx, "peel", VC::kHand, false, {});
  AddVerb(lx, "catch", VC::kHand, false, {"caught"});
  AddVerb(lx, "throw", VC::kHand, false, {"threw", "thrown"});
  AddVerb(lx, "draw", VC::kHand, false, {"drew", "drawn"});
  AddVerb(lx, "clap", VC::kHand, true, {});
  AddVerb(lx, "paint", VC::kHand, false, {});
  AddVerb(lx, "punch", VC::kContact, false, {});
  AddVerb(lx, "hit", VC::kContact, true, {"hit"});
  AddVerb(lx, "kick", VC::kContact, false, {});
  AddVerb(lx, "hug", VC::kContact, true, {});
  AddVerb(lx, "push", VC::kContact, false, {});
  AddVerb(lx, "break", VC::kContact, false, {"broke", "broken"});
  AddVerb(lx, "touch", VC::kContact, false, {});
  AddVerb(lx, "kiss", VC::kContact, false, {});
  AddVerb(lx, "lift", VC::kContact, false, {});
  AddVerb(lx, "shake", VC::kContact, false, {"shook"});
  AddVerb(lx, "strike", VC::kContact, false, {"struck"});
  AddVerb(lx, "pull", VC::kContact, false, {});
  AddVerb(lx, "tackle", VC::kContact, false, {});
  AddVerb(lx, "carry", VC::kContact, false, {});
  AddVerb(lx, "slap", VC::kContact, true, {});
  AddVerb(lx, "bite", VC::kContact, false, {"bit", "bitten"});
  AddVerb(lx, "look", VC::kGaze, false, {});
  AddVerb(lx, "watch", VC::kGaze, false, {});
  AddVerb(lx, "stare", VC::kGaze, false, {});
  AddVerb(lx, "gaze", VC::kGaze, false, {});
  AddVerb(lx, "point", VC::kGaze, false, {});
  AddVerb(lx, "talk", VC::kGaze, false, {});
  AddVerb(lx, "glance", VC::kGaze, false, {});
  AddVerb(lx, "chase", VC::kGaze, false, {});
  AddVerb(lx, "follow", VC::kGaze, false, {});
  AddVerb(lx, "greet", VC::kGaze, false, {});
  AddVerb(lx, "nod", VC::kGaze, true, {});
  AddVerb(lx, "blow", VC::kState, false, {"blew", "blown"});
  AddVerb(lx, "fall", VC::kState, false, {"fell", "fallen"});
  AddVerb(lx, "float", VC::kState, false, {});
  AddVerb(lx, "drift", VC::kState, false, {});
  AddVerb(lx, "fly", VC::kState, false, {"flew", "flown"});
  AddVerb(lx, "sway", VC::kState, false, {});
  AddVerb(lx, "swirl", VC::kState, false, {});
  AddVerb(lx, "flutter", VC::kState, false, {});
  AddVerb(lx, "flow", VC::kState, false, {});
  AddVerb(lx, "glow", VC::kState, false, {});
  AddVerb(lx, "burn", VC::kState, false, {});
  AddVerb(lx, "melt", VC::kState, false, {});
  AddVerb(lx, "shine", VC::kState, false, {"shone"});
  AddVerb(lx, "sink", VC::kState, false, {"sank", "sunk"});
  AddVerb(lx, "sleep", VC::kState, false, {"slept"});
  AddVerb(lx, "sit", VC::kState, true, {"sat"});
  AddVerb(lx, "stand", VC::kState, false, {"stood"});
  AddVerb(lx, "rise", VC::kState, false, {"risen"});
  AddVerb(lx, "lie", VC::kState, false, {"lay"});
  lx.verbs.emplace("waving", VerbEntry{"wave", VC::kGaze});
  lx.verbs.emplace("waved", VerbEntry{"wave", VC::kGaze});
  lx.verb_class["wave"] = VC::kGaze;
  return lx;
}

const Lexicon& Lex() {
  static const Lexicon lx = BuildLexicon();
  return lx;
}

std::string BaseName(std::string_view name) {
  const auto hash = name.find('#');
  return std::string(name.substr(0, hash));
}

constexpr std::string_view kPlaceholder = "qtext";

bool IsClauseBreak(char c) {
  return c == ',' || c == '(' || c == ')' || c == '/' || c == ':' || c == '\n';
}

class Parser {
 public:
  void Sentence(std::string_view sentence) {
    // Mask quoted spans so their words are not parsed as scene vocabulary.
    std::string masked;
    for (std::size_t pos = 0; pos < sentence.size();) {
      std::size_t open_len = 0;
      std::string_view close;
      if (sentence[pos] == '"') {
        open_len = 1;
        close = "\"";
      } else if (sentence.substr(pos).starts_with("“")) {
        open_len = 3;
        close = "”";
      }
      if (open_len == 0) {
        masked.push_back(sentence[pos++]);
        continue;
      }
      const auto end = sentence.find(close, pos + open_len);
      if (end == std::string_view::npos) {
        pos += open_len;
        continue;
      }
      const auto content = std::string(sentence.substr(pos + open_len, end - pos - open_len));
      masked += " " + std::string(kPlaceholder) + std::to_string(AddText(content)) + " ";
      pos = end + close.size();
    }

    const auto all_tokens = text::Tokenize(masked);
    sentence_explicit_ =
        std::any_of(all_tokens.begin(), all_tokens.end(),
                    [](const auto& t) { return t == "clearly" || t == "explicitly"; });
    sentence_entities_.clear();
    forced_.clear();
    std::size_t start = 0;
    for (std::size_t i = 0; i <= masked.size(); ++i) {
      if (i == masked.size() || IsClauseBreak(masked[i])) {
        Clause(text::Tokenize(std::string_view(masked).substr(start, i - start)));
        start = i + 1;
      }
    }
  }

  ParsedPrompt Finish() { return std::move(out_); }

 private:
  struct PendingAttr {
    AttrKind kind;
    std::string value;
  };
  struct PendingRelation {
    RelationTrigger trigger;
    std::string subject;
    bool via_pronoun = false;
  };

  SceneGraph& scene() { return out_.scene; }

  std::size_t AddText(const std::string& content) {
    for (std::size_t i = 0; i < scene().texts.size(); ++i) {
      if (scene().texts[i].content == content) return i;
    }
    scene().texts.push_back({content, ""});
    return scene().texts.size() - 1;
  }

  Fact& AddFact(Fact f) {
    f.is_explicit = f.is_explicit || sentence_explicit_;
    for (auto& existing : out_.facts) {
      if (existing.key == f.key) {
        existing.is_explicit = existing.is_explicit || f.is_explicit;
        existing.consistent = existing.consistent || f.consistent;
        return existing;
      }
    }
    out_.facts.push_back(std::move(f));
    return out_.facts.back();
  }

  void RemoveFact(const std::string& key) {
    std::erase_if(out_.facts, [&](const Fact& f) { return f.key == key; });
  }

  bool HasFact(const std::string& key) const { return out_.FindFact(key) != nullptr; }

  std::string OtherSentenceEntity(const std::string& name) const {
    for (auto it = sentence_entities_.rbegin(); it != sentence_entities_.rend(); ++it) {
      if (*it != name) return *it;
    }
    return {};
  }

  void SetAttr(const std::string& entity, AttrKind kind, const std::string& value,
               bool via_pronoun, bool consistent) {
    Entity* e = scene().FindEntity(entity);
    if (e == nullptr) return;
    Fact f;
    f.entity = entity;
    f.value = value;
    f.via_pronoun = via_pronoun;
    f.consistent = consistent;
    switch (kind) {
      case AttrKind::kColor:
        e->attributes.color = value;
        f.kind = FactKind::kColor;
        f.key = "color:" + entity;
        break;
      case AttrKind::kSize:
        e->attributes.size = value;
        f.kind = FactKind::kSize;
        f.key = "size:" + entity;
        break;
      case AttrKind::kMaterial:
        e->attributes.material = value;
        f.kind = FactKind::kMaterial;
        f.key = "material:" + entity;
        break;
      case AttrKind::kExpression:
        e->attributes.expression = value;
        f.kind = FactKind::kExpression;
        f.key = "expression:" + entity;
        break;
    }
    if (via_pronoun) f.alt_entity = OtherSentenceEntity(entity);
    AddFact(std::move(f));
  }

  void FlushAttrs(const std::string& owner, bool via_pronoun) {
    for (const auto& a : pending_attrs_) {
      SetAttr(owner, a.kind, a.value, via_pronoun,
              clause_consistent_ && a.kind == AttrKind::kColor);
    }
    pending_attrs_.clear();
  }

  void AddRelation(Relation r, bool via_pronoun) {
    if (r.subject.empty() || r.subject == r.object) return;
    std::size_t idx = scene().relations.size();
    for (std::size_t i = 0; i < scene().relations.size(); ++i) {
      if (scene().relations[i] == r) idx = i;
    }
    if (idx == scene().relations.size()) scene().relations.push_back(r);
    Fact f;
    f.kind = FactKind::kRelation;
    f.key = r.kind == RelationKind::kLayout
                ? "rel:layout:" + r.subject
                : "rel:" + std::string(ToString(r.kind)) + ":" + r.subject + ":" +
                      r.object + ":" + r.detail;
    f.entity = r.subject;
    f.value = r.detail;
    f.index = idx;
    f.via_pronoun = via_pronoun;
    AddFact(std::move(f));
  }

  std::size_t AddAction(const std::string& actor, const VerbEntry& verb) {
    for (std::size_t i = 0; i < scene().actions.size(); ++i) {
      const auto& a = scene().actions[i];
      if (a.actor == actor && a.verb == verb.lemma) return i;
    }
    Action a;
    a.actor = actor;
    a.verb = verb.lemma;
    a.contact = verb.cls == VerbClass::kContact;
    scene().actions.push_back(a);
    const auto idx = scene().actions.size() - 1;
    Fact f;
    f.kind = FactKind::kAction;
    f.key = "action:" + actor + ":" + verb.lemma;
    f.entity = actor;
    f.value = verb.lemma;
    f.index = idx;
    AddFact(std::move(f));
    return idx;
  }

  void SetTarget(std::size_t action_idx, const std::string& target) {
    auto& a = scene().actions[action_idx];
    if (a.target || a.actor == target) return;
    a.target = target;
    if (VerbClassOf(a.verb) == VerbClass::kHand) a.contact = true;
  }

  std::string PickActor() const {
    for (auto it = sentence_entities_.rbegin(); it != sentence_entities_.rend(); ++it) {
      const auto k = ActorKindOf(*it);
      if (k == ActorKind::kHuman || k == ActorKind::kAnimal || k == ActorKind::kHand ||
          k == ActorKind::kNature) {
        return *it;
      }
    }
    return sentence_entities_.empty() ? std::string() : sentence_entities_.back();
  }

  // Returns false when the mention was consumed by a negation.
  bool OnNoun(const std::string& base, bool plural) {
    if (pending_negation_) {
      const bool exp = *pending_negation_;
      pending_negation_.reset();
      auto& neg = scene().negated_entities;
      if (std::find(neg.begin(), neg.end(), base) == neg.end()) neg.push_back(base);
      Fact f;
      f.kind = FactKind::kNegation;
      f.key = "neg:" + base;
      f.entity = base;
      f.is_explicit = exp;
      AddFact(std::move(f));
      pending_count_.reset();
      pending_attrs_.clear();
      return false;
    }
    std::string name = base;
    if (force_new_) {
      const int k = ++forced_[base] + 1;
      name = base + "#" + std::to_string(k);
      force_new_ = false;
    }
    if (scene().FindEntity(name) == nullptr) scene().entities.push_back({name, {}, 1});
    Entity* e = scene().FindEntity(name);
    if (pending_count_) {
      e->count = *pending_count_;
      RemoveFact("vague:" + name);
      Fact f;
      f.kind = FactKind::kCount;
      f.key = "count:" + name;
      f.entity = name;
      f.count = *pending_count_;
      f.is_explicit = count_explicit_;
      AddFact(std::move(f));
    } else if ((pending_vague_ || plural) && !HasFact("count:" + name)) {
      e->count = std::max(e->count, 2);
      Fact f;
      f.kind = FactKind::kVagueCount;
      f.key = "vague:" + name;
      f.entity = name;
      AddFact(std::move(f));
    }
    pending_count_.reset();
    pending_vague_ = false;
    count_explicit_ = false;
    FlushAttrs(name, false);

    if (pending_relation_) {
      auto pr = std::move(*pending_relation_);
      pending_relation_.reset();
      Relation r;
      r.kind = pr.trigger.kind;
      r.detail = pr.trigger.detail;
      r.subject = pr.trigger.reversed ? name : pr.subject;
      r.object = pr.trigger.reversed ? pr.subject : name;
      AddRelation(std::move(r), pr.via_pronoun);
    }
    if (pending_actor_verb_) {
      awaiting_target_ = AddAction(name, *pending_actor_verb_);
      pending_actor_verb_.reset();
    } else if (awaiting_target_) {
      SetTarget(*awaiting_target_, name);
      awaiting_target_.reset();
    }

    clause_last_ = name;
    last_via_pronoun_ = false;
    verb_since_entity_ = false;
    if (std::find(sentence_entities_.begin(), sentence_entities_.end(), name) ==
        sentence_entities_.end()) {
      sentence_entities_.push_back(name);
    }
    prompt_last_ = name;
    return true;
  }

  std::string Owner() const {
    if (!clause_last_.empty()) return clause_last_;
    if (!sentence_entities_.empty()) return sentence_entities_.back();
    return prompt_last_;
  }

  void Clause(const std::vector<std::string>& tok) {
    const auto& lx = Lex();
    clause_last_.clear();
    clause_text_.reset();
    clause_consistent_ = false;
    pending_attrs_.clear();
    pending_count_.reset();
    pending_vague_ = false;
    count_explicit_ = false;
    pending_negation_.reset();
    pending_relation_.reset();
    pending_actor_verb_.reset();
    awaiting_target_.reset();
    force_new_ = false;
    last_via_pronoun_ = false;
    verb_since_entity_ = false;
    for (const auto& t : tok) {
      if (t == "all" || t == "every" || t == "each") clause_consistent_ = true;
    }

    std::vector<std::string> sing;
    sing.reserve(tok.size());
    for (const auto& t : tok) sing.push_back(text::Singularize(t));

    for (std::size_t i = 0; i < tok.size();) {
      const auto& t = tok[i];
      if (t.starts_with(kPlaceholder) && t.size() > kPlaceholder.size()) {
        const auto idx = std::stoul(t.substr(kPlaceholder.size()));
        clause_text_ = idx;
        Fact f;
        f.kind = FactKind::kTextContent;
        f.key = "text:" + std::to_string(idx) + ":content";
        f.value = scene().texts[idx].content;
        f.index = idx;
        AddFact(std::move(f));
        ++i;
        continue;
      }
      if (auto hit = lx.negations.Match(tok, i)) {
        pending_negation_ = *hit.value;
        i += hit.length;
        continue;
      }
      if (auto hit = lx.positions.Match(tok, i)) {
        OnPosition(*hit.value);
        i += hit.length;
        continue;
      }
      if (auto hit = lx.counterfactual.Match(tok, i)) {
        scene().counterfactual = true;
        Fact f;
        f.kind = FactKind::kCounterfactual;
        f.key = "counterfactual";
        AddFact(std::move(f));
        i += hit.length;
        continue;
      }
      if (auto hit = lx.knowledge.Match(tok, i)) {
        const auto& k = *hit.value;
        if (OnNoun(k.canonical, false)) {
          auto& tags = scene().knowledge_tags;
          if (std::find(tags.begin(), tags.end(), k.canonical) == tags.end()) {
            tags.push_back(k.canonical);
          }
          Fact f;
          f.kind = FactKind::kKnowledge;
          f.key = "knowledge:" + k.canonical;
          f.value = k.canonical;
          f.entity = k.canonical;
          AddFact(std::move(f));
        }
        i += hit.length;
        continue;
      }
      if (auto hit = lx.styles.Match(tok, i)) {
        scene().style = *hit.value;
        Fact f;
        f.kind = FactKind::kStyle;
        f.key = "style";
        f.value = *hit.value;
        AddFact(std::move(f));
        i += hit.length;
        if (i < tok.size() && tok[i] == "style") ++i;
        continue;
      }
      if (auto hit = lx.relations.Match(tok, i)) {
        if (OnRelation(*hit.value, tok, i + hit.length)) {
          i += hit.length;
          // "made of <material>" consumed its argument.
          if (consumed_material_) {
            i = skip_to_ + 1;
            consumed_material_ = false;
          }
          continue;
        }
      }
      if (lx.comparatives.count(t) && i + 1 < tok.size() && tok[i + 1] == "than") {
        if (!clause_last_.empty()) {
          pending_relation_ =
              PendingRelation{{RelationKind::kComparison, t, false}, clause_last_, false};
          force_new_ = true;
        }
        i += 2;
        continue;
      }
      if (t == "exactly" || t == "precisely") {
        count_explicit_ = true;
        ++i;
        continue;
      }
      if (auto it = lx.numbers.find(t); it != lx.numbers.end()) {
        pending_count_ = it->second;
        ++i;
        continue;
      }
      if (!t.empty() && std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; }) &&
          t.size() <= 3) {
        pending_count_ = std::stoi(t);
        if (*pending_count_ <= 0) pending_count_.reset();
        ++i;
        continue;
      }
      if (lx.vague.count(t)) {
        pending_vague_ = true;
        ++i;
        continue;
      }
      if (t == "another" || t == "other" || t == "second") {
        force_new_ = true;
        ++i;
        continue;
      }
      if (lx.pronouns.count(t)) {
        OnPronoun();
        ++i;
        continue;
      }
      if (auto hit = lx.nouns.Match(sing, i)) {
        // The plural mark is on the head (last) word.
        const auto& head = tok[i + hit.length - 1];
        const bool plural = head != sing[i + hit.length - 1];
        std::string name = sing[i];
        for (std::size_t k = 1; k < hit.length; ++k) name += " " + sing[i + k];
        OnNoun(name, plural);
        i += hit.length;
        continue;
      }
      if (auto hit = lx.wearables.Match(sing, i)) {
        const auto owner = Owner();
        if (!owner.empty()) FlushAttrs(owner, false);
        i += hit.length;
        continue;
      }
      if (auto hit = lx.adjectives.Match(tok, i)) {
        pending_attrs_.push_back({hit.value->first, hit.value->second});
        i += hit.length;
        continue;
      }
      if (auto it = lx.verbs.find(t); it != lx.verbs.end()) {
        OnVerb(it->second);
        ++i;
        continue;
      }
      ++i;
    }

    if (!pending_attrs_.empty() && !clause_last_.empty()) {
      FlushAttrs(clause_last_, last_via_pronoun_);
    }
  }

  void OnPosition(const std::string& pos) {
    if (clause_text_) {
      scene().texts[*clause_text_].position = pos;
      Fact f;
      f.kind = FactKind::kTextPosition;
      f.key = "text:" + std::to_string(*clause_text_) + ":position";
      f.value = pos;
      f.index = *clause_text_;
      AddFact(std::move(f));
      return;
    }
    if (clause_last_.empty()) return;
    Relation r;
    r.kind = RelationKind::kLayout;
    r.subject = clause_last_;
    r.detail = pos;
    // One layout per entity: later statements overwrite earlier ones.
    for (auto& existing : scene().relations) {
      if (existing.kind == RelationKind::kLayout && existing.subject == r.subject) {
        existing.detail = pos;
        return AddRelation(existing, false);
      }
    }
    AddRelation(std::move(r), false);
  }

  bool OnRelation(const RelationTrigger& trigger, const std::vector<std::string>& tok,
                  std::size_t next) {
    const auto& lx = Lex();
    if (trigger.kind == RelationKind::kSpatial ||
        (trigger.kind == RelationKind::kContainment && trigger.reversed)) {
      if (clause_last_.empty() || verb_since_entity_) return false;
      // "in a"/"in the" only count as containment before a container noun.
      if (trigger.detail == "in a" || trigger.detail == "in the") {
        if (next >= tok.size()) return false;
        if (!lx.nouns.Match(std::vector<std::string>{text::Singularize(tok[next])}, 0)) {
          return false;
        }
      }
    }
    std::string subject = clause_last_.empty() ? Owner() : clause_last_;
    if (subject.empty()) return false;
    if (trigger.kind == RelationKind::kComposition) {
      std::size_t j = next;
      while (j < tok.size() && (tok[j] == "a" || tok[j] == "an" || tok[j] == "the" ||
                                tok[j] == "pure" || tok[j] == "solid")) {
        ++j;
      }
      if (j < tok.size() && lx.materials.count(tok[j])) {
        // Only a bare material word; "ice sculpture" style heads stay nouns.
        const bool head_follows =
            j + 1 < tok.size() &&
            lx.nouns.Match(std::vector<std::string>{text::Singularize(tok[j + 1])}, 0);
        if (!head_follows) {
          const auto hit = lx.adjectives.Match(tok, j);
          SetAttr(subject, AttrKind::kMaterial, hit.value->second, last_via_pronoun_, false);
          consumed_material_ = true;
          skip_to_ = j;
          return true;
        }
      }
    }
    pending_relation_ = PendingRelation{trigger, subject, last_via_pronoun_};
    return true;
  }

  void OnPronoun() {
    if (sentence_entities_.empty()) return;
    clause_last_ = sentence_entities_.front();
    last_via_pronoun_ = true;
    verb_since_entity_ = false;
  }

  void OnVerb(const VerbEntry& verb) {
    verb_since_entity_ = true;
    pending_relation_.reset();
    const auto actor = PickActor();
    if (actor.empty()) {
      pending_actor_verb_ = verb;
      return;
    }
    awaiting_target_ = AddAction(actor, verb);
  }

  ParsedPrompt out_;
  bool sentence_explicit_ = false;
  std::vector<std::string> sentence_entities_;
  std::map<std::string, int> forced_;
  std::string prompt_last_;

  std::string clause_last_;
  std::optional<std::size_t> clause_text_;
  bool clause_consistent_ = false;
  std::vector<PendingAttr> pending_attrs_;
  std::optional<int> pending_count_;
  bool pending_vague_ = false;
  bool count_explicit_ = false;
  std::optional<bool> pending_negation_;
  std::optional<PendingRelation> pending_relation_;
  std::optional<VerbEntry> pending_actor_verb_;
  std::optional<std::size_t> awaiting_target_;
  bool force_new_ = false;
  bool last_via_pronoun_ = false;
  bool verb_since_entity_ = false;
  bool consumed_material_ = false;
  std::size_t skip_to_ = 0;
};

}  // namespace

const Fact* ParsedPrompt::FindFact(std::string_view key) const {
  for (const auto& f : facts) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

std::vector<std::string> SplitSentences(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  bool in_quote = false;
  auto flush = [&] {
    auto t = text::Trim(cur);
    if (!t.empty()) out.push_back(std::move(t));
    cur.clear();
  };
  for (std::size_t pos = 0; pos < text.size();) {
    const std::size_t start = pos;
    const char32_t cp = text::DecodeAt(text, pos);
    cur.append(text.substr(start, pos - start));
    if (cp == U'"' || cp == U'“' || cp == U'”') {
      in_quote = cp == U'"' ? !in_quote : cp == U'“';
      continue;
    }
    if (in_quote) continue;
    if (cp == U'.' || cp == U'!' || cp == U'?' || cp == U';' || cp == U'\n' ||
        cp == U'。' || cp == U'！' || cp == U'？' || cp == U'；') {
      flush();
    }
  }
  flush();
  return out;
}

ParsedPrompt ParsePrompt(std::string_view text) {
  Parser p;
  for (const auto& s : SplitSentences(text)) p.Sentence(s);
  return p.Finish();
}

ActorKind ActorKindOf(std::string_view entity_name) {
  const auto& lx = Lex();
  auto it = lx.noun_kind.find(BaseName(entity_name));
  return it == lx.noun_kind.end() ? ActorKind::kUnknown : it->second;
}

std::optional<VerbClass> VerbClassOf(std::string_view lemma) {
  const auto& lx = Lex();
  auto it = lx.verb_class.find(std::string(lemma));
  if (it == lx.verb_class.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> ActionKeypoints(const Action& action) {
  const auto cls = VerbClassOf(action.verb);
  if (!cls) return {};
  const auto kind = ActorKindOf(action.actor);
  const bool targeted = action.target.has_value();
  std::vector<std::string> out;
  if (kind == ActorKind::kAnimal) {
    out.push_back("animal-action");
  } else if (kind == ActorKind::kHuman || kind == ActorKind::kHand) {
    switch (*cls) {
      case VerbClass::kBody:
        out.push_back(kind == ActorKind::kHand ? "hand-action" : "full-body-action");
        break;
      case VerbClass::kHand:
        out.push_back("hand-action");
        break;
      case VerbClass::kContact:
        if (!targeted) out.push_back("full-body-action");
        break;
      case VerbClass::kGaze:
        if (!targeted) out.push_back("state");
        break;
      case VerbClass::kState:
        out.push_back("state");
        break;
    }
  } else {
    out.push_back("state");
  }
  if (targeted && *cls == VerbClass::kContact) out.push_back("contact-interaction");
  if (targeted && *cls == VerbClass::kGaze) out.push_back("interaction-wo-contact");
  return out;
}

const std::vector<std::string>& Positions() { return Lex().position_names; }

}  // namespace promptalign::grammar
