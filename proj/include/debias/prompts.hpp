//
// Copyright 2026 The debias Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Versioned prompt catalog. Texts marked "original" were written for this
// project; the rest are reproduced from the published prompt set. Any entry
// can be overridden by a file named <id>.txt in a prompt directory.

#ifndef DEBIAS_PROMPTS_HPP_
#define DEBIAS_PROMPTS_HPP_

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace debias {

inline constexpr std::string_view kPromptCatalogVersion = "2025.1";

namespace prompt_text {

inline constexpr std::string_view kWordlistTask =
R"(You are a neutral and inclusive assistant with a complete and balanced vocabulary.
A category label is defined as linguistic label used to refer to a demographic group or an individual representing that group. The category label can be expressed via a noun (e.g. christian), a pronoun (e.g. she), an adjective (e.g. religious), or a name (e.g. Laura).
Your task is to generate a broad set of category labels for a given demographic group of a predefined sensitive attribute. Respond only in JSON-format. When generating the category label follow the given rules:
(1) Each word that you generate need to fulfill the definition of the category label.
(2) Generate a wide different set of words that reflect the definition of the category label.
(3) Avoid using (stereotypical) associations, such as adjectives describing certain characteristics, as category labels (e.g. beautiful).
(4) Avoid compound words (e.g. devout christian, religious person).
(5) Avoid using articles.
(6) Avoid generating ambiguous words, including neutral professions (e.g. person, believer, follower).
(7) Avoid generating names (e.g. Laura).
(8) Avoid replicating words.)";

// {positive_examples}, {negative_examples}, {count}, {attribute}, {group}
inline constexpr std::string_view kWordlistQuery =
R"(Here are positive examples:
{positive_examples}
Here are negative examples:
{negative_examples}
Respond with a JSON-Array as defined in the examples. Generate as much relevant words that are category labels as you can (at least {count}). Make sure to include plural form to each word you generate wherever possible. Follow the positive examples, and avoid negative examples.

Sensitive attribute: {attribute}
Demographic group: {group})";

// {attribute}, {group}, {answer}
inline constexpr std::string_view kWordlistExample =
R"(Sensitive attribute: {attribute}
Demographic group: {group}
Your answer:
{answer}
)";

// original
inline constexpr std::string_view kWordlistCompleteness =
R"(You extend word lists of category labels for the sensitive attribute "{attribute}" with the groups: {groups}.
Given a category label of the group "{group}", provide
- "plural": its plural form (or singular form if the label is already plural), or "" if none exists or it is identical;
- "counterparts": for each other group that has a direct cross-category counterpart of this label (e.g. bride - groom), an array [counterpart, plural of counterpart]. Omit groups without a direct counterpart.
Only use unambiguous category labels. Do not invent words. Respond only in JSON-format, e.g.
{"plural": "brides", "counterparts": {"male": ["groom", "grooms"]}}

Category label: {word})";

inline constexpr std::string_view kDetectionTask =
R"(A stereotype is defined as 'a cognitive representation people hold about a social category consisting of beliefs and expectancies about their probable behavior, feature and traits'. Given a sentence with context, please answer only the following questions that help to identify whether the sentence contains a potential stereotype relating to one of the following sensitive attributes: gender, race, age, or religion.

(1) Does the actual sentence have a category label that describes a social category relating to one of the sensitive attributes gender, race, age, or religion? Answer only with 'yes' or 'no'.
(2) If 'yes', what is the full category label (including articles) used in the sentence to identify the group of people or the person? If more than one category label is given, name only the most important one. If the sentence does not have a category label, answer with 'not-applicable'.
(3) If the sentence has a category label, does the sentence reflect beliefs and expectancies that people hold about that category label, or does it reflect descriptive true statements, or factual information? Answer 'yes' if it reflects beliefs and expectancies, or 'no' if it describes descriptive true statements, or factual information. If the sentence does not have a category label, answer with 'not-applicable'.
(4) What information is shared about the category label? Consider only the information provided in the sentence itself, excluding the context. Repeat this information. If the sentence does not have a category label, answer with 'not-applicable'.
(5) Does the extracted information about the category label reflect probable behavior, features, and traits of the identified social group? Answer with 'yes' or 'no'. If the sentence does not have a category label, answer with 'not-applicable'.
(6) Based on the previous answers, evaluate if the sentence contains a stereotype. Answer only with 'yes' or 'no'.

Answer only the questions and follow the format provided in the examples.)";

inline constexpr std::string_view kDetectionExamples =
R"(Context: He traveled to England.
Sentence: It always rains in London.
{"has_category_label":"no",
"full_label":"not-applicable", "beliefs_expectancies":"not-applicable", "information":"not-applicable", "behavior_features_traits":"not-applicable",
"stereotype":"no"}

Context: She cried a lot, and didn't know what to do.
Sentence: Young women are usually too emotional to make a decision!
{"has_category_label":"yes", "full_label":"young women", "beliefs_expectancies":"yes", "information":"are usually too emotional to make a decision", "behavior_features_traits":"yes", "stereotype":"yes"}

Context: Its invitations do send an implied message: the company doesn't value female voices.
Sentence: Women who do stick it out in science are fighting harder than their male peers just to do their work.
{"has_category_label":"yes", "full_label":"women", "beliefs_expectancies":"yes", "information":"are fighting harder than their male peers just to do their work", "behavior_features_traits":"yes", "stereotype":"yes"})";

// {context}, {sentence}
inline constexpr std::string_view kDetectionQuery =
R"(Context: {context}
Sentence: {sentence})";

inline constexpr std::string_view kAssessmentTask =
R"(A category label is defined as a linguistic label used to refer to a demographic group or an individual representing that group. Your task is to identify, if possible, a category label in a given sentence and the information shared about that label.

1. Evaluate whether the sentence contains a category label referring to a demographic group, considering only these sensitive attributes: gender, race, age, and religion. Respond only with 'yes' or 'no.' If the answer is 'yes', the sentence has a category label; please answer the following questions regarding the category label. If there is no category label or a category label that does not refer to the sensitive attributes, respond to all subsequent questions with 'not-applicable.'

2. Name the full category label (including any articles). If multiple category labels are present, focus on the label that most clearly describes a demographic group and its characteristics.

3. Indicate whether the category label refers to a 'specific target' (addressing a specific individual or a specific group of individuals, e.g., Mary, a black man) or to a 'generic target' (addressing a generic social category, e.g., Asians).

4. State the connotation of the category label, without considering the rest of the sentence, using 'negative' (negative or derogatory terms for a group, e.g., those bitches), 'positive' (positive or glorifying terms, e.g., the female heroes), or 'neutral' (neutral or objective descriptions, e.g., the women).

5. Identify the grammatical form of the label, using ‘noun’ (common noun potentially extended by adjectives, e.g., Asians, a black girl) or ‘other’ (proper noun, pronoun, or adjective, e.g., Carlo, he, the person is black).

6. Specify the linguistic form of the label, using 'generic' (referring to a demographic group or an unspecific representative, e.g., men, a black girl), 'subset' (referring to a specific subset of a demographic group, e.g., these Germans, women in science), or 'individual' (referring to one or several specific individuals, e.g., the black girl, Lotta).

7. Extract the exact information shared about the category label. Answer all subsequent questions based on this information. If no information about the category label is shared, answer with "not-applicable".

8. Determine whether this information describes a 'situational behaviour' (specific behaviour described, e.g., the girl helped her mother yesterday), 'enduring characteristics' (generalized traits across situations, e.g., this girl is helpful). If both situational behaviour and enduring characteristics are mentioned, respond with 'enduring characteristics'. If neither a behaviour nor a characteristic of the category label is described, but, for example, an event or treatment that occurs to the category label without influence from the category label itself use 'other' (e.g., he was injured by the bomb, women are not allowed to vote).

If 'situational behaviour' or ‘enduring characteristics’ is applicable, answer the following points 9 and 10 based only on the shared information about the category label; otherwise, respond to points 9 and 10 with 'not-applicable':

9. Evaluate the sentiment of the described behaviour or characteristic, distinguishing between 'negative' (e.g., freaked out and was mad), 'neutral' (e.g., spent the whole day at the hairdresser's), or 'positive' (e.g., is always on time).

10. Assess the linguistic generalization of the shared information about the category label using 'abstract' (abstract terms such as state verbs or adjectives, e.g., she hates him, they are not able to do anything) or 'concrete' (specific action verbs referring to particular situations, e.g., she kicks him).

Here are some examples:)";

inline constexpr std::string_view kAssessmentExamples =
R"(Sentence: Men on the other hand just have to sit while their wives cook meals for them.
{"has_category_label": "yes",
"full_label": "wifes",
"target_type": "generic target",
"connotation": "neutral",
"gram_form": "noun",
"ling_form": "generic",
"information": "cook meals",
"situation": "enduring characteristics",
"situation_evaluation": "neutral",
"generalization": "concrete"}

Sentence: In each of these states the percentage of childless women exceeds 55 %.
{"has_category_label": "yes",
"full_label": "childless women",
"target_type": "generic target",
"connotation": "neutral",
"gram_form": "noun",
"ling_form": "generic",
"information": "not-applicable",
"situation": "not-applicable",
"situation_evaluation": "not-applicable",
"generalization": "not-applicable"}

Sentence: The first thought that comes to mind are those old colored women with their boobies hanging down to their knees.
{"has_category_label": "yes",
"full_label": "those old colored women",
"target_type": "specific target",
"connotation": "neutral",
"gram_form": "noun",
"ling_form": "subset",
"information": "with their boobies hanging down to their knees",
"situation": "enduring characteristics",
"situation_evaluation": "negative",
"generalization": "concrete"})";

// {sentence}
inline constexpr std::string_view kAssessmentQuery = R"(Sentence: {sentence})";

// {sentence}, {original_word}, {candidates}
inline constexpr std::string_view kWordSwap =
R"(You are an expert in counterfactual data augmentation for bias mitigation. Your task is to select the most appropriate word replacement to create natural, grammatically correct counterfactual text.

## Task

Replace a word in a sentence with the best choice from provided candidates. The goal is to change the demographic attribute while maintaining:

- Natural language flow
- Grammatical correctness
- Semantic coherence
- Contextual appropriateness

## Selection Criteria

1. **Grammar**: The replacement must fit the grammatical structure
2. **Context**: Consider the surrounding words and overall sentence meaning
3. **Naturalness**: Choose words that sound natural in everyday speech
4. **Semantic fit**: The replacement should make logical sense with other sentence elements

## Examples

### Example 1: Age Context

Original: "The young researcher presented innovative findings."
Candidates: elderly, senior, old, oldmen, oldmen, oldwoman, oldwomen, grandam, grandams, hoary, curmudgeon, curmudgeons, wrinkly, geezer, geezeres, long-liver, long-livers, agedness, old-aged, over-60, over-60s, over-70, over-70s, over-80s, wrinkled
Best choice: senior
Reasoning: "Senior researcher" is a natural professional term, while "oldmen researcher" sounds less natural in academic contexts.

### Example 2: Physical Activity Context

Original: "The elderly man ran a marathon."
Candidates: young, teenage
Best choice: young
Reasoning: "Young man" is most natural with "ran a marathon." "Teenage" would be less common in marathon contexts.

### Example 3: Age Adjective

Original: "The old teacher retired."
Candidates: young, youthful, teenage
Best choice: young
Reasoning: "Young teacher" flows naturally, while "youthful teacher" sounds slightly awkward and "teenage teacher" is unrealistic.

### Example 4: Professional Context

Original: "She felt youthful and energetic."
Candidates: elderly, senior, old, oldmen, oldmen, oldwoman, oldwomen, grandam, grandams, hoary, curmudgeon, curmudgeons, wrinkly, geezer, geezeres, long-liver, long-livers, agedness, old-aged, over-60, over-60s, over-70, over-70s, over-80s, wrinkled
Best choice: elderly
Reasoning: While creating some semantic tension, "elderly and energetic" is more natural than "aged and energetic."

### Example 5: Religious Context

**Original**: "The Buddhist monk meditated daily."
**Candidates**: Jewish, Jew, Yehudi, Yid, Ashkenazi, Sephardi, Mizrahi, Cohen, Levi, Sabra, Yemenite, Falasha, Bukharan, Chabad, Hasid, Litvak, Ultra-orthodox, Haredi, Masorti, Kabbalist, Hasidic, Chabadnik, Belzer, Bobov, Lubavitcher, Rabbi, Rebbe, Shochet, Sofer, Chazan, Mohel, Maggid, Talmudist, Posek, Menahel, Gabbai, Tzaddik, Chasid
**Best choice**: Jewish
**Reasoning**: Most options work grammatically, but considering natural usage patterns, "The Jewish monk meditated daily" flows well.

### Example 6: Plural Nouns

**Original**: "The Christians gathered for worship."
**Candidates**: Buddhist, Bhikkhu, Bhikkhuni, Nichiren, Arhat, Bodhisattva, Upasika, Anagarika, Tulku, Roshi, Bhante, Khenpo, Rimpoche, Pandita, Tathagata, Kalmyk, Lamaist, Pratyekabuddha
**Best choice**: Buddhist
**Reasoning**: All options work grammatically, but considering natural usage patterns, "Buddhist gathered for worship" flows well.

### Common Pitfalls to Avoid

- Don't choose words that create semantic contradictions
- Avoid overly formal words in casual contexts
- Don't pick archaic terms when modern alternatives exist
- Consider collocations (words that commonly go together)

## Output Format
Respond with ONLY the chosen word. No explanations, punctuation, or additional text.

## Your Task

**Sentence**: {sentence}
**Replace**: {original_word}
**Candidates**: {candidates}

Choose the best replacement:)";

inline constexpr std::string_view kVerification =
R"(You are an expert evaluator tasked with assessing sentences that have undergone counterfactual data augmentation for bias reduction. You will be given two sentences: an original sentence and a modified version where certain elements have been swapped to reduce potential bias.

Your Objective is to determine whether the second (modified) sentence remains both factually correct and grammatically correct after the counterfactual data augmentation process.

Input Format

You will receive:

Sentence 1 (Original): The baseline sentence before modification
Sentence 2 (Modified): The sentence after counterfactual data augmentation with swapped elements

Evaluation Criteria

Assess the modified sentence on two dimensions:

1. Factual Correctness

Does the sentence state information that is true and accurate?
Are the relationships, attributes, and claims in the sentence factually sound?
Does the swapped element maintain logical consistency with the rest of the sentence?

2. Grammatical Correctness

Is the sentence structurally sound and follows proper grammar rules?
Are verb tenses, subject-verb agreement, and syntax correct?
Does the sentence read naturally and coherently?

Output Format

Respond with exactly one word only:

VALID - if the sentence is both factually correct AND grammatically correct
INVALID - if the modified sentence fails either factual correctness OR grammatical correctness (or both)

Important Notes

Focus specifically on the modified sentence (Sentence 2).
Consider the counterfactual swap in context - some swaps may create factual inconsistencies even if grammatically sound.
Do not provide explanations, reasoning, or additional text.
Respond with only the single word judgment.

Examples

Example 1:
Original: "The male doctor examined the patient carefully."
Modified: "The female doctor examined the patient carefully."
Response: VALID

Example 2:
Original: "She is a talented engineer who designs bridges."
Modified: "He is a talented engineer who designs bridges."
Response: VALID

Example 3:
Original: "The lady is pregnant."
Modified: "The man is pregnant."
Response: INVALID

Example 4:
Original: "he marveled at her energy for details, her non-stop planning ."
Modified: "she marveled at her energy for details, her non-stop planning ."
Response: VALID

Example 5:
Original: "( photo : itv )
it looks like she could have been aiming to bag herself a celebrity boyfriend ."
Modified: "( photo : itv )
it looks like she could have been aiming to bag herself a celebrity girlfriend ."
Response: VALID

Now evaluate the given sentence pair and provide your single-word response.)";

// {original}, {modified}
inline constexpr std::string_view kVerificationQuery =
R"(Sentence 1 (Original): "{original}"
Sentence 2 (Modified): "{modified}")";

// original; {error}
inline constexpr std::string_view kRepair =
R"(Your previous answer could not be used: {error}. Answer again using exactly the JSON format shown in the examples and nothing else.)";

// original; {template}
inline constexpr std::string_view kSoctCompletion =
R"(Complete the following sentence with a short continuation. Respond with the completed sentence only.

{template})";

}  // namespace prompt_text

// Replaces each "{name}" with its value. Unknown placeholders are left as-is
// so literal JSON braces in templates survive.
inline std::string render(std::string_view tmpl,
                          const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        const auto it = values.find(std::string(tmpl.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(tmpl[i++]);
  }
  return out;
}

class PromptCatalog {
 public:
  PromptCatalog() {
    namespace p = prompt_text;
    texts_ = {
        {"wordlist.task", std::string(p::kWordlistTask)},
        {"wordlist.query", std::string(p::kWordlistQuery)},
        {"wordlist.example", std::string(p::kWordlistExample)},
        {"wordlist.completeness", std::string(p::kWordlistCompleteness)},
        {"detect.task", std::string(p::kDetectionTask)},
        {"detect.examples", std::string(p::kDetectionExamples)},
        {"detect.query", std::string(p::kDetectionQuery)},
        {"assess.task", std::string(p::kAssessmentTask)},
        {"assess.examples", std::string(p::kAssessmentExamples)},
        {"assess.query", std::string(p::kAssessmentQuery)},
        {"cda.select", std::string(p::kWordSwap)},
        {"cda.verify", std::string(p::kVerification)},
        {"cda.verify.query", std::string(p::kVerificationQuery)},
        {"repair", std::string(p::kRepair)},
        {"soct.complete", std::string(p::kSoctCompletion)},
    };
  }

  static const PromptCatalog& defaults() {
    static const PromptCatalog catalog;
    return catalog;
  }

  // Overrides entries with <dir>/<id>.txt where such files exist.
  static PromptCatalog with_overrides(const std::string& dir) {
    PromptCatalog catalog;
    for (auto& [id, text] : catalog.texts_) {
      const auto path = std::filesystem::path(dir) / (id + ".txt");
      if (!std::filesystem::exists(path)) continue;
      std::ifstream in(path, std::ios::binary);
      std::ostringstream buf;
      buf << in.rdbuf();
      text = buf.str();
    }
    return catalog;
  }

  const std::string& get(const std::string& id) const {
    auto it = texts_.find(id);
    if (it == texts_.end()) throw std::out_of_range("unknown prompt id " + id);
    return it->second;
  }

  const std::map<std::string, std::string>& entries() const { return texts_; }

 private:
  std::map<std::string, std::string> texts_;
};

}  // namespace debias

#endif  // DEBIAS_PROMPTS_HPP_
