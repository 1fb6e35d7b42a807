#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "vigil/corpus.hpp"
#include "vigil/error.hpp"
#include "vigil/random.hpp"
#include "vigil/vectorspace.hpp"

namespace vigil {

using TopicId = std::uint32_t;

struct LdaConfig {
    std::size_t k = 4;
    std::optional<double> alpha;  // unset: 50 / k
    double beta = 0.01;
    std::size_t iterations = 1000;
    std::uint64_t seed = 0;

    double effective_alpha() const { return alpha.value_or(50.0 / static_cast<double>(k)); }

    void validate() const {
        if (k < 1) throw std::invalid_argument("LDA: k must be >= 1");
        if (alpha && !(*alpha > 0.0)) throw std::invalid_argument("LDA: alpha must be > 0");
        if (!(beta > 0.0)) throw std::invalid_argument("LDA: beta must be > 0");
        if (iterations < 1) throw std::invalid_argument("LDA: iterations must be >= 1");
    }
};

// State of a collapsed Gibbs chain: per-token topic assignments and the
// count tables derived from them. Only in-vocabulary tokens take part.
struct LdaModel {
    LdaConfig config;  // alpha always set
    std::size_t vocab_size = 0;
    std::string vocab_checksum;
    std::vector<std::string> doc_ids;
    std::vector<std::vector<TermId>> words;  // per document
    std::vector<std::vector<TopicId>> z;     // parallel to words
    std::vector<std::uint32_t> word_topic;   // n_kw, stored word-major: [w * k + t]
    std::vector<std::uint32_t> doc_topic;    // n_dk: [d * k + t]
    std::vector<std::uint32_t> topic_total;  // n_k

    std::size_t k() const { return config.k; }
    std::size_t n_docs() const { return doc_ids.size(); }
    double alpha() const { return *config.alpha; }
    double beta() const { return config.beta; }

    std::uint32_t n_kw(std::size_t topic, TermId w) const { return word_topic[w * k() + topic]; }
    std::uint32_t n_dk(std::size_t d, std::size_t topic) const { return doc_topic[d * k() + topic]; }
    std::uint32_t n_k(std::size_t topic) const { return topic_total[topic]; }

    // Rebuilds all count tables from z.
    void recount() {
        const std::size_t kk = k();
        word_topic.assign(vocab_size * kk, 0);
        doc_topic.assign(n_docs() * kk, 0);
        topic_total.assign(kk, 0);
        for (std::size_t d = 0; d < n_docs(); ++d)
            for (std::size_t i = 0; i < words[d].size(); ++i) {
                const TopicId t = z[d][i];
                ++word_topic[words[d][i] * kk + t];
                ++doc_topic[d * kk + t];
                ++topic_total[t];
            }
    }
};

namespace detail {

inline void gibbs_sweep(LdaModel& m, Rng& rng, std::vector<double>& cumulative) {
    const std::size_t kk = m.k();
    const double alpha = m.alpha();
    const double beta = m.beta();
    const double vbeta = beta * static_cast<double>(m.vocab_size);
    for (std::size_t d = 0; d < m.n_docs(); ++d) {
        std::uint32_t* dk = m.doc_topic.data() + d * kk;
        const auto& doc_words = m.words[d];
        auto& doc_z = m.z[d];
        for (std::size_t i = 0; i < doc_words.size(); ++i) {
            std::uint32_t* kw = m.word_topic.data() + static_cast<std::size_t>(doc_words[i]) * kk;
            TopicId t = doc_z[i];
            --dk[t];
            --kw[t];
            --m.topic_total[t];

            double total = 0.0;
            for (std::size_t j = 0; j < kk; ++j) {
                total += (dk[j] + alpha) * (kw[j] + beta) / (m.topic_total[j] + vbeta);
                cumulative[j] = total;
            }
            const double u = rng.uniform() * total;
            t = 0;
            while (t + 1 < kk && cumulative[t] <= u) ++t;

            doc_z[i] = t;
            ++dk[t];
            ++kw[t];
            ++m.topic_total[t];
        }
    }
}

inline LdaModel make_chain(const Corpus& corpus, const Vocabulary& vocab, LdaConfig cfg) {
    cfg.validate();
    cfg.alpha = cfg.effective_alpha();
    LdaModel m;
    m.config = cfg;
    m.vocab_size = vocab.size();
    m.vocab_checksum = vocab.checksum();
    m.doc_ids.reserve(corpus.size());
    m.words.reserve(corpus.size());
    for (const Document& d : corpus) {
        m.doc_ids.push_back(d.id);
        std::vector<TermId> ids;
        ids.reserve(d.tokens.size());
        for (const auto& t : d.tokens)
            if (auto id = vocab.find(t)) ids.push_back(*id);
        m.words.push_back(std::move(ids));
    }
    return m;
}

}  // namespace detail

// Fits LDA by collapsed Gibbs sampling: topics initialized uniformly at
// random from cfg.seed, then cfg.iterations full sweeps. The final state is
// kept (no sample averaging).
inline LdaModel fit_lda(const Corpus& corpus, const Vocabulary& vocab, const LdaConfig& cfg) {
    LdaModel m = detail::make_chain(corpus, vocab, cfg);
    std::size_t n_tokens = 0;
    for (const auto& w : m.words) n_tokens += w.size();
    if (n_tokens == 0) throw DataError("LDA: no document has an in-vocabulary token");

    Rng rng(cfg.seed);
    m.z.resize(m.n_docs());
    for (std::size_t d = 0; d < m.n_docs(); ++d) {
        m.z[d].resize(m.words[d].size());
        for (auto& t : m.z[d]) t = static_cast<TopicId>(rng.below(m.k()));
    }
    m.recount();

    std::vector<double> cumulative(m.k());
    for (std::size_t it = 0; it < m.config.iterations; ++it) detail::gibbs_sweep(m, rng, cumulative);
    return m;
}

// phi[t][w] = (n_kw + beta) / (n_k + beta |V|)
inline std::vector<std::vector<double>> estimate_phi(const LdaModel& m) {
    const double vbeta = m.beta() * static_cast<double>(m.vocab_size);
    std::vector<std::vector<double>> phi(m.k(), std::vector<double>(m.vocab_size));
    for (std::size_t t = 0; t < m.k(); ++t) {
        const double denom = m.n_k(t) + vbeta;
        for (std::size_t w = 0; w < m.vocab_size; ++w)
            phi[t][w] = (m.n_kw(t, static_cast<TermId>(w)) + m.beta()) / denom;
    }
    return phi;
}

// theta[d][t] = (n_dk + alpha) / (len_d + alpha k)
inline std::vector<std::vector<double>> estimate_theta(const LdaModel& m) {
    const double ka = m.alpha() * static_cast<double>(m.k());
    std::vector<std::vector<double>> theta(m.n_docs(), std::vector<double>(m.k()));
    for (std::size_t d = 0; d < m.n_docs(); ++d) {
        const double denom = static_cast<double>(m.words[d].size()) + ka;
        for (std::size_t t = 0; t < m.k(); ++t) theta[d][t] = (m.n_dk(d, t) + m.alpha()) / denom;
    }
    return theta;
}

struct RankedTerm {
    std::string term;
    double phi = 0.0;
};

// The n highest-phi terms of a topic; ties in lexicographic order.
inline std::vector<RankedTerm> top_words(const LdaModel& m, const Vocabulary& vocab, std::size_t topic,
                                         std::size_t n) {
    if (topic >= m.k()) throw std::out_of_range("top_words: topic " + std::to_string(topic) + " out of range");
    if (vocab.size() != m.vocab_size) throw std::invalid_argument("top_words: vocabulary does not match model");
    const double vbeta = m.beta() * static_cast<double>(m.vocab_size);
    std::vector<RankedTerm> ranked;
    ranked.reserve(vocab.size());
    for (std::size_t w = 0; w < vocab.size(); ++w)
        ranked.push_back({vocab.term(static_cast<TermId>(w)),
                          (m.n_kw(topic, static_cast<TermId>(w)) + m.beta()) / (m.n_k(topic) + vbeta)});
    const std::size_t keep = std::min(n, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(),
                      [](const RankedTerm& a, const RankedTerm& b) {
                          if (a.phi != b.phi) return a.phi > b.phi;
                          return a.term < b.term;
                      });
    ranked.resize(keep);
    return ranked;
}

inline void write_top_words_csv(std::ostream& out, const LdaModel& m, const Vocabulary& vocab, std::size_t n) {
    out << "topic,rank,term,phi\n";
    char buf[64];
    for (std::size_t t = 0; t < m.k(); ++t) {
        const auto ranked = top_words(m, vocab, t, n);
        for (std::size_t r = 0; r < ranked.size(); ++r) {
            std::snprintf(buf, sizeof buf, "%.8f", ranked[r].phi);
            out << t << ',' << r + 1 << ',' << ranked[r].term << ',' << buf << '\n';
        }
    }
}

// ---------------------------------------------------------------------------
// Hard clustering
// ---------------------------------------------------------------------------

// Document -> cluster map in corpus order. Documents without tokens have no
// topic evidence and are listed in `excluded` instead.
struct Clustering {
    std::size_t k = 0;
    std::vector<std::pair<std::string, std::size_t>> assignment;
    std::vector<std::string> excluded;

    std::unordered_map<std::string, std::size_t> as_map() const {
        std::unordered_map<std::string, std::size_t> m;
        for (const auto& [id, c] : assignment) m.emplace(id, c);
        return m;
    }

    bool operator==(const Clustering&) const = default;

    // "id,cluster"; excluded documents carry the cluster value "excluded".
    void write_csv(std::ostream& out) const {
        out << "id,cluster\n";
        for (const auto& [id, c] : assignment) out << id << ',' << c << '\n';
        for (const auto& id : excluded) out << id << ",excluded\n";
    }

    // k defaults to the largest cluster id + 1.
    static Clustering read_csv(std::istream& in, std::optional<std::size_t> k = std::nullopt) {
        Clustering c;
        std::string line;
        if (!std::getline(in, line) || line.rfind("id,cluster", 0) != 0)
            throw DataError("clustering CSV: missing 'id,cluster' header");
        std::size_t line_no = 1, max_id = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            const auto comma = line.rfind(',');
            if (comma == std::string::npos || comma == 0)
                throw DataError("clustering CSV line " + std::to_string(line_no) + ": expected id,cluster");
            std::string id = line.substr(0, comma), value = line.substr(comma + 1);
            if (value == "excluded") {
                c.excluded.push_back(std::move(id));
                continue;
            }
            std::size_t cluster = 0;
            try {
                std::size_t used = 0;
                cluster = std::stoull(value, &used);
                if (used != value.size()) throw std::invalid_argument(value);
            } catch (const std::exception&) {
                throw DataError("clustering CSV line " + std::to_string(line_no) + ": bad cluster '" + value + "'");
            }
            max_id = std::max(max_id, cluster);
            c.assignment.emplace_back(std::move(id), cluster);
        }
        c.k = k.value_or(c.assignment.empty() ? 0 : max_id + 1);
        if (!c.assignment.empty() && max_id >= c.k) throw DataError("clustering CSV: cluster id exceeds k");
        return c;
    }
};

// cluster(d) = argmax_t theta[d][t], ties to the lowest topic.
inline Clustering hard_assign(const LdaModel& m) {
    Clustering c;
    c.k = m.k();
    const auto theta = estimate_theta(m);
    for (std::size_t d = 0; d < m.n_docs(); ++d) {
        if (m.words[d].empty()) {
            c.excluded.push_back(m.doc_ids[d]);
            continue;
        }
        std::size_t best = 0;
        for (std::size_t t = 1; t < m.k(); ++t)
            if (theta[d][t] > theta[d][best]) best = t;
        c.assignment.emplace_back(m.doc_ids[d], best);
    }
    return c;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json to_json(const LdaModel& m) {
    nlohmann::ordered_json j;
    j["format"] = "vigil-lda/1";
    j["config"] = {{"k", m.config.k},
                   {"alpha", m.alpha()},
                   {"beta", m.config.beta},
                   {"iterations", m.config.iterations},
                   {"seed", m.config.seed}};
    j["vocab_size"] = m.vocab_size;
    j["vocab_checksum"] = m.vocab_checksum;
    auto docs = nlohmann::ordered_json::array();
    for (std::size_t d = 0; d < m.n_docs(); ++d) docs.push_back({{"id", m.doc_ids[d]}, {"z", m.z[d]}});
    j["documents"] = std::move(docs);
    return j;
}

// Rebuilds a model from its JSON form; token ids are re-derived from the
// corpus and must match the stored assignments in length.
inline LdaModel lda_from_json(const nlohmann::json& j, const Corpus& corpus, const Vocabulary& vocab) {
    try {
        LdaConfig cfg;
        const auto& c = j.at("config");
        cfg.k = c.at("k").get<std::size_t>();
        cfg.alpha = c.at("alpha").get<double>();
        cfg.beta = c.at("beta").get<double>();
        cfg.iterations = c.at("iterations").get<std::size_t>();
        cfg.seed = c.at("seed").get<std::uint64_t>();
        if (j.at("vocab_checksum").get<std::string>() != vocab.checksum())
            throw DataError("LDA model was fitted against a different vocabulary");

        LdaModel m = detail::make_chain(corpus, vocab, cfg);
        const auto& docs = j.at("documents");
        if (docs.size() != m.n_docs()) throw DataError("LDA model document count differs from corpus");
        m.z.resize(m.n_docs());
        for (std::size_t d = 0; d < m.n_docs(); ++d) {
            if (docs[d].at("id").get<std::string>() != m.doc_ids[d])
                throw DataError("LDA model document order differs from corpus at '" + m.doc_ids[d] + "'");
            m.z[d] = docs[d].at("z").get<std::vector<TopicId>>();
            if (m.z[d].size() != m.words[d].size())
                throw DataError("LDA model token count differs for '" + m.doc_ids[d] + "'");
            for (TopicId t : m.z[d])
                if (t >= cfg.k) throw DataError("LDA model topic id out of range");
        }
        m.recount();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("LDA model: ") + e.what());
    }
}

}  // namespace vigil
