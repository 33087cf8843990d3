// Copyright 2026 The vte-nlp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "vte/corpus.hpp"
#include "vte/error.hpp"
#include "vte/rng.hpp"

namespace vte {
namespace {

using Pool = std::vector<std::string>;

// Templates use {side}, {lobe}, {uvein}, {lvein}, {size}, {limb} slots.
const Pool kSides{"right", "left"};
const Pool kLobes{"upper lobe", "middle lobe", "lower lobe", "lingular"};
const Pool kUpperVeins{"subclavian", "axillary", "brachial", "basilic", "internal jugular"};
const Pool kLowerVeins{"common femoral", "femoral", "popliteal", "posterior tibial",
                       "peroneal"};
const Pool kSizes{"0.4", "0.6", "0.8", "1.2", "1.5"};
const Pool kLimbs{"upper", "lower"};

// --- chest CT angiography ------------------------------------------------

const Pool kPeFindings{
    "There is an occlusive thrombus in the {side} {lobe} segmental artery.",
    "Small filling defect within the subsegmental branch of the {side} {lobe}.",
    "Acute pulmonary embolism involving the {side} {lobe} segmental arteries.",
    "Filling defects are seen in the {side} {lobe} segmental arteries consistent with acute "
    "pulmonary emboli.",
    "Nonocclusive thrombus extends into the {side} interlobar artery.",
    "Saddle embolus at the bifurcation of the main pulmonary artery.",
};
const Pool kPeSubtleFindings{
    "Small filling defect within the subsegmental branch of the {side} {lobe}.",
    "Tiny eccentric filling defect in a {side} {lobe} subsegmental artery.",
};
const Pool kPeNegatedFindings{
    "No filling defect in the segmental arteries.",
    "No evidence of pulmonary embolism.",
    "Negative for acute pulmonary embolus.",
    "The pulmonary arteries are well opacified without filling defect.",
    "No central or segmental pulmonary embolism is identified.",
    "Question of subsegmental filling defect in the {side} {lobe} is likely artifact.",
};
// Positive sentences built around a compound clot word (see clot_word) and
// otherwise identical to the look-alike filler below.
const Pool kPeCompoundFindings{
    "There is {clot} material in the {side} {lobe} pulmonary artery.",
    "Focal {clot} change along the {side} {lobe} pulmonary artery wall.",
};
const Pool kPeLookAlikeFiller{
    "There is mixing artifact in the {side} {lobe} pulmonary artery.",
    "Focal mural change along the {side} {lobe} pulmonary artery wall.",
};
const std::string kPeChronic =
    "Chronic thrombus in the {side} {lobe} pulmonary artery, unchanged.";
const Pool kPePositiveImpressions{
    "Acute pulmonary embolism as described above.",
    "Findings consistent with acute pulmonary emboli.",
    "Segmental filling defects compatible with acute embolus.",
};
const Pool kPeSubtleImpressions{
    "Small {side} pleural effusion.",
    "Mild bibasilar atelectasis.",
    "Findings as above.",
};
const Pool kPeNegativeImpressions{
    "No evidence of pulmonary embolism.",
    "Negative for pulmonary embolus.",
    "No acute cardiopulmonary abnormality.",
};
const Pool kPeFiller{
    "The heart is normal in size.",
    "Small {side} pleural effusion.",
    "Mild bibasilar atelectasis.",
    "The thoracic aorta is normal in caliber.",
    "Scattered calcified granulomas are present.",
    "Degenerative changes of the thoracic spine.",
    "The visualized upper abdomen is unremarkable.",
    "Trachea and central airways are patent.",
    "Nodule measuring {size} cm in the {side} {lobe}.",
    "Dependent opacity measuring {size} cm in the {side} lower lobe.",
    "Right ventricle to left ventricle ratio is 0.9.",
    "Dr. Smith was notified of the findings.",
    "Emphysematous changes are seen in both upper lobes.",
};
const Pool kPeNegatedFiller{
    "There is no pericardial effusion.",
    "No pneumothorax.",
    "Lungs are clear without focal consolidation.",
    "No mediastinal lymphadenopathy.",
    "No suspicious pulmonary nodule.",
    "Negative for acute fracture.",
};
const Pool kPeHistories{"Shortness of breath", "Chest pain", "Tachycardia and hypoxia",
                        "Hemoptysis", "Elevated D-dimer"};

// --- extremity duplex ultrasound -----------------------------------------

const Pool kDvtUpperFindings{
    "Occlusive thrombus within the {side} {uvein} vein.",
    "Acute deep venous thrombosis of the {side} {uvein} vein.",
    "Noncompressible {side} {uvein} vein with intraluminal thrombus.",
};
const Pool kDvtLowerFindings{
    "Occlusive thrombus within the {side} {lvein} vein.",
    "Acute deep venous thrombosis of the {side} {lvein} vein.",
    "Noncompressible {side} {lvein} vein with intraluminal thrombus.",
};
const Pool kDvtNegatedFindings{
    "No evidence of deep venous thrombosis in the {side} {limb} extremity.",
    "The {lvein} veins are fully compressible without intraluminal thrombus.",
    "The {uvein} veins are fully compressible without intraluminal thrombus.",
    "Negative for acute thrombus.",
};
const Pool kDvtFiller{
    "Normal color flow and augmentation.",
    "Phasic flow with respiration.",
    "Superficial veins are unremarkable.",
    "Small Baker cyst measuring {size} cm is noted.",
    "Waveforms are symmetric.",
    "Arterial flow is within normal limits.",
};
const Pool kDvtNegatedFiller{
    "No superficial venous thrombophlebitis.",
    "No fluid collection.",
    "No abnormal lymph nodes.",
};

const std::string& pick(const Pool& pool, Rng& rng) { return pool[rng.index(pool.size())]; }

// prefix + stem + suffix, e.g. "microthrombotic". Most of the ~100 forms are
// rare enough that a held-out report often carries one never seen in training.
std::string clot_word(Rng& rng) {
  static const Pool kPrefixes{"", "micro", "sub", "peri", "intra", "multi", "pan"};
  static const Pool kThrombSuffixes{"us", "i", "otic", "osed", "oembolic", "oemboli", "ogenic"};
  static const Pool kEmbolSuffixes{"us", "i", "ic", "ism", "ization", "ized", "oid"};
  const bool thromb = rng.bernoulli(0.5);
  std::string word = pick(kPrefixes, rng);
  word += thromb ? "thromb" : "embol";
  word += pick(thromb ? kThrombSuffixes : kEmbolSuffixes, rng);
  return word;
}

std::string fill(std::string tmpl, Rng& rng) {
  struct Slot {
    const char* key;
    const Pool* pool;
  };
  const Slot slots[] = {{"{side}", &kSides},       {"{lobe}", &kLobes},
                        {"{uvein}", &kUpperVeins}, {"{lvein}", &kLowerVeins},
                        {"{size}", &kSizes},       {"{limb}", &kLimbs}};
  for (std::size_t pos = tmpl.find("{clot}"); pos != std::string::npos; pos = tmpl.find("{clot}")) {
    tmpl.replace(pos, 6, clot_word(rng));
  }
  for (const Slot& slot : slots) {
    const std::string key = slot.key;
    for (std::size_t pos = tmpl.find(key); pos != std::string::npos; pos = tmpl.find(key)) {
      tmpl.replace(pos, key.size(), pick(*slot.pool, rng));
    }
  }
  return tmpl;
}

std::size_t word_count(const std::string& s) {
  std::size_t n = 0;
  bool in_word = false;
  for (unsigned char c : s) {
    const bool space = std::isspace(c) != 0;
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

std::string join_sentences(const std::vector<std::string>& sentences) {
  std::string out;
  for (const std::string& s : sentences) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

// Builds a body of the requested length with the mandatory sentences placed at
// random positions among filler.
std::vector<std::string> body(std::vector<std::string> required, const Pool& filler,
                              const Pool& negated_filler, double negation_rate,
                              std::size_t target_words, Rng& rng) {
  std::size_t words = 0;
  for (const auto& s : required) words += word_count(s);
  std::vector<std::string> sentences = std::move(required);
  while (words < target_words) {
    std::string s = fill(rng.bernoulli(negation_rate) ? pick(negated_filler, rng)
                                                      : pick(filler, rng),
                         rng);
    words += word_count(s);
    sentences.push_back(std::move(s));
  }
  rng.shuffle(sentences.begin(), sentences.end());
  return sentences;
}

std::string pe_report(int label, const SynthSpec& spec, std::size_t target, Rng& rng) {
  std::vector<std::string> required;
  std::string impression;
  if (label == 0) {
    const std::size_t n = 1 + rng.index(2);
    for (std::size_t i = 0; i < n; ++i) required.push_back(fill(pick(kPeNegatedFindings, rng), rng));
    if (rng.bernoulli(0.1)) required.push_back(fill(kPeChronic, rng));
    if (rng.bernoulli(0.3)) required.push_back(fill(pick(kPeLookAlikeFiller, rng), rng));
    impression = fill(pick(rng.bernoulli(0.3) ? kPeSubtleImpressions : kPeNegativeImpressions, rng),
                      rng);
  } else if (rng.bernoulli(0.3)) {
    // A compound clot word is the only positive cue.
    required.push_back(fill(pick(kPeCompoundFindings, rng), rng));
    if (rng.bernoulli(spec.negation_rate)) {
      required.push_back(fill(pick(kPeNegatedFindings, rng), rng));
    }
    impression = fill(pick(kPeSubtleImpressions, rng), rng);
  } else if (rng.bernoulli(0.3)) {
    // Subtle positives: a single small finding and a non-specific impression.
    required.push_back(fill(pick(kPeSubtleFindings, rng), rng));
    if (rng.bernoulli(spec.negation_rate)) {
      required.push_back(fill(pick(kPeNegatedFindings, rng), rng));
    }
    impression = fill(pick(kPeSubtleImpressions, rng), rng);
  } else {
    const std::size_t n = 1 + rng.index(3);
    for (std::size_t i = 0; i < n; ++i) required.push_back(fill(pick(kPeFindings, rng), rng));
    if (rng.bernoulli(spec.negation_rate * 0.5)) {
      required.push_back(fill(pick(kPeNegatedFindings, rng), rng));
    }
    impression = fill(pick(kPePositiveImpressions, rng), rng);
  }
  const std::size_t header_words = 20;
  const std::size_t body_target = target > header_words ? target - header_words : 1;
  std::string text = "EXAM: CT angiography of the chest with contrast.\nCLINICAL HISTORY: " +
                     pick(kPeHistories, rng) +
                     ".\nTECHNIQUE: Axial images were obtained after intravenous contrast.\n"
                     "FINDINGS:\n";
  text += join_sentences(body(std::move(required), kPeFiller, kPeNegatedFiller,
                              spec.negation_rate, body_target, rng));
  text += "\nIMPRESSION:\n" + impression;
  return text;
}

std::string dvt_report(int label, const SynthSpec& spec, std::size_t target, Rng& rng) {
  std::vector<std::string> required;
  std::string impression;
  const bool upper = label == 1 || (label == 0 && rng.bernoulli(0.5));
  if (label == 0) {
    required.push_back(fill(pick(kDvtNegatedFindings, rng), rng));
    impression = "No acute deep venous thrombosis.";
  } else {
    const Pool& findings = label == 1 ? kDvtUpperFindings : kDvtLowerFindings;
    const std::size_t n = 1 + rng.index(2);
    for (std::size_t i = 0; i < n; ++i) required.push_back(fill(pick(findings, rng), rng));
    impression = label == 1 ? "Acute deep venous thrombosis of the upper extremity."
                            : "Acute deep venous thrombosis of the lower extremity.";
    if (rng.bernoulli(spec.negation_rate * 0.5)) {
      required.push_back(fill(pick(kDvtNegatedFindings, rng), rng));
    }
  }
  const std::size_t header_words = 12;
  const std::size_t body_target = target > header_words ? target - header_words : 1;
  std::string text = std::string("EXAM: Duplex ultrasound of the ") + pick(kSides, rng) +
                     (upper ? " upper" : " lower") + " extremity veins.\nFINDINGS:\n";
  text += join_sentences(body(std::move(required), kDvtFiller, kDvtNegatedFiller,
                              spec.negation_rate, body_target, rng));
  text += "\nIMPRESSION:\n" + impression;
  return text;
}

}  // namespace

std::vector<Report> generate_synthetic(const SynthSpec& spec, const LabelScheme& scheme) {
  spec.validate(scheme);
  std::vector<std::size_t> counts = apportion(spec.n_reports, spec.class_proportions);
  // Guarantee one report per class even for tiny n.
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      auto largest = std::max_element(counts.begin(), counts.end());
      --*largest;
      ++counts[c];
    }
  }
  std::vector<int> labels;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    labels.insert(labels.end(), counts[c], static_cast<int>(c));
  }
  Rng order_rng(derive_seed(spec.seed, 0x0de5));
  order_rng.shuffle(labels.begin(), labels.end());

  const bool dvt = scheme.name == "dvt";
  std::vector<Report> reports;
  reports.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    Rng rng(derive_seed(spec.seed, i + 1));
    const double scale = rng.uniform(0.6, 1.4);
    const auto target = static_cast<std::size_t>(static_cast<double>(spec.mean_length_tokens) * scale);
    char id[32];
    std::snprintf(id, sizeof(id), "syn-%06zu", i);
    Report r;
    r.id = id;
    r.label = labels[i];
    r.text = dvt ? dvt_report(labels[i], spec, target, rng) : pe_report(labels[i], spec, target, rng);
    reports.push_back(std::move(r));
  }
  return reports;
}

}  // namespace vte
