#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "vigil/corpus.hpp"
#include "vigil/error.hpp"
#include "vigil/random.hpp"
#include "vigil/topics.hpp"

namespace vigil {

struct ClassSignature {
    ClassLabel label = ClassLabel::News;
    std::vector<std::string> terms;
    std::vector<double> weights;  // empty: uniform
};

// Planted-structure corpus description. Each token comes from the shared
// background vocabulary with probability `mix`, otherwise from the
// document's class signature.
struct SynthSpec {
    std::vector<ClassSignature> classes;
    std::vector<std::string> shared_vocab;
    double mix = 0.2;
    std::size_t docs_per_class = 100;
    std::size_t doc_len_min = 5;
    std::size_t doc_len_max = 15;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(mix >= 0.0 && mix <= 1.0)) throw DataError("synth: mix must lie in [0, 1]");
        if (doc_len_min < 1 || doc_len_max < doc_len_min) throw DataError("synth: need 1 <= doc_len min <= max");
        if (mix > 0.0 && shared_vocab.empty()) throw DataError("synth: mix > 0 needs a background vocabulary");
        std::unordered_set<std::string> seen_terms;
        std::unordered_set<int> seen_labels;
        for (const auto& c : classes) {
            if (!seen_labels.insert(static_cast<int>(c.label)).second)
                throw DataError("synth: class " + std::string(to_string(c.label)) + " listed twice");
            if (mix < 1.0 && c.terms.empty())
                throw DataError("synth: class " + std::string(to_string(c.label)) + " has no signature terms");
            if (!c.weights.empty()) {
                if (c.weights.size() != c.terms.size()) throw DataError("synth: weights and terms differ in length");
                double sum = 0.0;
                for (double w : c.weights) {
                    if (!(w >= 0.0)) throw DataError("synth: negative signature weight");
                    sum += w;
                }
                if (!(sum > 0.0)) throw DataError("synth: signature weights sum to zero");
            }
            for (const auto& t : c.terms)
                if (!seen_terms.insert(t).second) throw DataError("synth: signature term '" + t + "' is not disjoint");
        }
    }

    // Four disjoint class signatures with legible Portuguese terms.
    static SynthSpec defaults() {
        SynthSpec s;
        s.classes = {
            {ClassLabel::News,
             {"casos", "confirma", "mil", "prefeitura", "secretaria", "boletim", "registra", "campanha", "saúde",
              "município"},
             {}},
            {ClassLabel::Joke,
             {"whatsapp", "parado", "zoeira", "meme", "kkkk", "crush", "preguiça", "sextou", "aitizapi", "timeline"},
             {}},
            {ClassLabel::MosquitoFocus,
             {"foco", "água", "rua", "pneu", "vaso", "calha", "criadouro", "larva", "piscina", "entulho"},
             {}},
            {ClassLabel::Sickness,
             {"febre", "sintoma", "doente", "dor", "hospital", "exame", "mancha", "internado", "médico", "cabeça"},
             {}},
        };
        s.shared_vocab = {"dengue", "mosquito", "aedes",  "zika",   "chikungunya", "epidemia", "vírus",
                          "brasil", "gente",    "hoje",   "dia",    "ano",         "cidade",   "bairro",
                          "combate", "surto",   "verão",  "chuva",  "notícia",     "bicho"};
        return s;
    }
};

inline Corpus generate(const SynthSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    Corpus corpus({}, "synthetic corpus (seed " + std::to_string(spec.seed) + ")");
    std::size_t serial = 0;
    for (const auto& cls : spec.classes) {
        std::vector<double> cumulative(cls.terms.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < cls.terms.size(); ++i) {
            acc += cls.weights.empty() ? 1.0 : cls.weights[i];
            cumulative[i] = acc;
        }
        for (std::size_t n = 0; n < spec.docs_per_class; ++n) {
            const std::size_t len = spec.doc_len_min + rng.below(spec.doc_len_max - spec.doc_len_min + 1);
            Document d;
            char id[32];
            std::snprintf(id, sizeof id, "syn-%06zu", ++serial);
            d.id = id;
            d.gold_label = cls.label;
            d.tokens.reserve(len);
            for (std::size_t i = 0; i < len; ++i) {
                if (rng.uniform() < spec.mix) {
                    d.tokens.push_back(spec.shared_vocab[rng.below(spec.shared_vocab.size())]);
                } else {
                    const double u = rng.uniform() * acc;
                    std::size_t j = static_cast<std::size_t>(
                        std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
                    d.tokens.push_back(cls.terms[std::min(j, cls.terms.size() - 1)]);
                }
            }
            for (const auto& t : d.tokens) {
                if (!d.raw_text.empty()) d.raw_text += ' ';
                d.raw_text += t;
            }
            corpus.add(std::move(d));
        }
    }
    return corpus;
}

// sum over clusters of the majority gold-class count, over the number of
// clustered documents. Invariant under relabeling of clusters.
inline double purity(const Clustering& clustering, const std::unordered_map<std::string, ClassLabel>& gold) {
    if (clustering.assignment.empty()) throw DataError("purity: empty clustering");
    std::vector<std::array<std::size_t, kAllLabels.size()>> counts(clustering.k, std::array<std::size_t, 4>{});
    for (const auto& [id, c] : clustering.assignment) {
        auto it = gold.find(id);
        if (it == gold.end()) throw DataError("purity: document '" + id + "' has no gold label");
        if (c >= clustering.k) throw DataError("purity: cluster id out of range");
        ++counts[c][label_index(it->second)];
    }
    std::size_t majority = 0;
    for (const auto& row : counts) majority += *std::max_element(row.begin(), row.end());
    return static_cast<double>(majority) / static_cast<double>(clustering.assignment.size());
}

inline std::unordered_map<std::string, ClassLabel> gold_labels(const Corpus& corpus) {
    std::unordered_map<std::string, ClassLabel> m;
    for (const Document& d : corpus)
        if (d.gold_label) m.emplace(d.id, *d.gold_label);
    return m;
}

// ---------------------------------------------------------------------------
// JSON configuration
// ---------------------------------------------------------------------------

// Missing keys keep the values of `base`.
inline SynthSpec synth_spec_from_json(const nlohmann::json& j, SynthSpec base = SynthSpec::defaults()) {
    try {
        if (auto it = j.find("classes"); it != j.end()) {
            base.classes.clear();
            for (const auto& c : *it) {
                ClassSignature sig;
                const auto name = c.at("label").get<std::string>();
                auto label = parse_label(name);
                if (!label) throw DataError("synth: unknown label '" + name + "'");
                sig.label = *label;
                sig.terms = c.at("terms").get<std::vector<std::string>>();
                if (auto w = c.find("weights"); w != c.end()) sig.weights = w->get<std::vector<double>>();
                base.classes.push_back(std::move(sig));
            }
        }
        if (auto it = j.find("shared_vocab"); it != j.end()) base.shared_vocab = it->get<std::vector<std::string>>();
        if (auto it = j.find("mix"); it != j.end()) base.mix = it->get<double>();
        if (auto it = j.find("docs_per_class"); it != j.end()) base.docs_per_class = it->get<std::size_t>();
        if (auto it = j.find("doc_len"); it != j.end()) {
            auto range = it->get<std::vector<std::size_t>>();
            if (range.size() != 2) throw DataError("synth: doc_len must be [min, max]");
            base.doc_len_min = range[0];
            base.doc_len_max = range[1];
        }
        if (auto it = j.find("seed"); it != j.end()) base.seed = it->get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("synth spec: ") + e.what());
    }
    base.validate();
    return base;
}

inline nlohmann::ordered_json to_json(const SynthSpec& s) {
    nlohmann::ordered_json j;
    auto classes = nlohmann::ordered_json::array();
    for (const auto& c : s.classes) {
        nlohmann::ordered_json cj;
        cj["label"] = std::string(to_string(c.label));
        cj["terms"] = c.terms;
        if (!c.weights.empty()) cj["weights"] = c.weights;
        classes.push_back(std::move(cj));
    }
    j["classes"] = std::move(classes);
    j["shared_vocab"] = s.shared_vocab;
    j["mix"] = s.mix;
    j["docs_per_class"] = s.docs_per_class;
    j["doc_len"] = {s.doc_len_min, s.doc_len_max};
    j["seed"] = s.seed;
    return j;
}

inline SynthSpec load_synth_spec(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return synth_spec_from_json(j);
}

}  // namespace vigil
