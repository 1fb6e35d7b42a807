#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <ostream>
#include <span>
#include <thread>
#include <vector>

#include "vigil/clusteranalysis.hpp"
#include "vigil/topics.hpp"

namespace vigil {

struct SweepRow {
    std::size_t k = 0;
    LdaModel model;
    Clustering clustering;
    SimilarityMatrix matrix;
    SimilaritySummary summary;
};

// Fits one model per k (seed = base seed + k; alpha = 50/k unless the base
// config fixes it), hard-assigns and scores it. Chains for different k run
// on up to `threads` workers; results do not depend on the thread count.
inline std::vector<SweepRow> sweep(const Corpus& corpus, const Vocabulary& vocab, std::span<const std::size_t> k_values,
                                   const LdaConfig& base, unsigned threads = 1, SelfPairs mode = SelfPairs::Include) {
    if (k_values.empty()) throw std::invalid_argument("sweep: no k values");
    const TfidfIndex index(corpus, vocab);
    std::vector<SweepRow> rows(k_values.size());

    auto run = [&](std::size_t i) {
        LdaConfig cfg = base;
        cfg.k = k_values[i];
        cfg.seed = base.seed + k_values[i];
        SweepRow& row = rows[i];
        row.k = cfg.k;
        row.model = fit_lda(corpus, vocab, cfg);
        row.clustering = hard_assign(row.model);
        row.matrix = similarity_matrix(row.clustering, index, mode);
        row.summary = summarize(row.matrix);
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(k_values.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < k_values.size(); ++i) run(i);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next++; i < k_values.size(); i = next++) run(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return rows;
}

// k,intra,inter,ratio; inter and ratio are empty when k = 1.
inline void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << "k,intra,inter,ratio\n";
    char buf[128];
    for (const auto& r : rows) {
        if (r.summary.inter && *r.summary.inter > 0.0) {
            std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.4f\n", r.k, r.summary.intra, *r.summary.inter,
                          r.summary.intra / *r.summary.inter);
        } else if (r.summary.inter) {
            std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,inf\n", r.k, r.summary.intra, *r.summary.inter);
        } else {
            std::snprintf(buf, sizeof buf, "%zu,%.6f,,\n", r.k, r.summary.intra);
        }
        out << buf;
    }
}

}  // namespace vigil
