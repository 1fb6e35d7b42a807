#pragma once

#include <algorithm>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "vigil/corpus.hpp"
#include "vigil/error.hpp"
#include "vigil/topics.hpp"
#include "vigil/vectorspace.hpp"

namespace vigil {

// Whether intra-cluster similarity averages over the |C|^2 ordered pairs
// including each document with itself (Include) or over the |C|(|C|-1)
// distinct pairs (Exclude).
enum class SelfPairs { Include, Exclude };

// Unit-length TF-IDF vectors for every document of a corpus, normalized
// once up front.
class TfidfIndex {
public:
    TfidfIndex(const Corpus& corpus, const Vocabulary& vocab) : dimension_(vocab.size()) {
        units_.reserve(corpus.size());
        for (const Document& d : corpus) {
            rows_.emplace(d.id, units_.size());
            units_.push_back(tfidf(d, vocab).normalized());
        }
    }

    // Index over explicit vectors; row i gets the id std::to_string(i).
    explicit TfidfIndex(const std::vector<SparseVector>& vectors)
        : dimension_(vectors.empty() ? 0 : vectors.front().dimension()) {
        for (const auto& v : vectors) {
            if (v.dimension() != dimension_) throw std::invalid_argument("TfidfIndex: dimension mismatch");
            rows_.emplace(std::to_string(units_.size()), units_.size());
            units_.push_back(v.normalized());
        }
    }

    std::size_t size() const { return units_.size(); }
    std::size_t dimension() const { return dimension_; }
    const SparseVector& unit(std::size_t row) const { return units_[row]; }

    std::optional<std::size_t> row(std::string_view id) const {
        auto it = rows_.find(std::string(id));
        if (it == rows_.end()) return std::nullopt;
        return it->second;
    }

private:
    std::size_t dimension_;
    std::vector<SparseVector> units_;
    std::unordered_map<std::string, std::size_t> rows_;
};

namespace detail {

// Sum of the member unit vectors. By bilinearity of the dot product,
// sum_{i in A, j in B} cos(i, j) = (sum_A u_i) . (sum_B u_j).
inline std::vector<double> unit_sum(std::span<const std::size_t> rows, const TfidfIndex& index) {
    std::vector<double> s(index.dimension(), 0.0);
    for (std::size_t r : rows)
        for (const auto& [i, w] : index.unit(r).entries()) s[i] += w;
    return s;
}

inline double dense_dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline std::size_t nonzero_members(std::span<const std::size_t> rows, const TfidfIndex& index) {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [&](std::size_t r) { return !index.unit(r).is_zero(); }));
}

inline double pair_average(const std::vector<double>& sa, const std::vector<double>& sb, std::size_t na,
                           std::size_t nb, bool same, std::size_t same_nonzero, SelfPairs mode) {
    double total = dense_dot(sa, sb);
    double pairs = static_cast<double>(na) * static_cast<double>(nb);
    if (same && mode == SelfPairs::Exclude) {
        total -= static_cast<double>(same_nonzero);  // each nonzero self-pair contributes exactly 1
        pairs -= static_cast<double>(na);
        if (pairs == 0.0) return 0.0;  // singleton: no distinct pairs
    }
    return std::clamp(total / pairs, 0.0, 1.0);
}

}  // namespace detail

// Average pairwise TF-IDF cosine between two clusters of document rows.
// With identical clusters this is the intra-cluster similarity.
inline double cluster_similarity(std::span<const std::size_t> a, std::span<const std::size_t> b,
                                 const TfidfIndex& index, SelfPairs mode = SelfPairs::Include) {
    if (a.empty() || b.empty()) throw DataError("cluster_similarity: empty cluster");
    const bool same = std::ranges::equal(a, b);
    return detail::pair_average(detail::unit_sum(a, index), detail::unit_sum(b, index), a.size(), b.size(), same,
                                same ? detail::nonzero_members(a, index) : 0, mode);
}

// Symmetric matrix of cluster similarities. Empty clusters are dropped;
// cluster_ids[r] is the original cluster id of row r.
struct SimilarityMatrix {
    std::vector<std::vector<double>> values;
    std::vector<std::size_t> cluster_ids;
    std::vector<std::size_t> dropped;

    std::size_t k() const { return values.size(); }

    void write_csv(std::ostream& out) const {
        out << "cluster";
        for (std::size_t id : cluster_ids) out << ",topic_" << id + 1;
        out << '\n';
        char buf[32];
        for (std::size_t a = 0; a < k(); ++a) {
            out << "topic_" << cluster_ids[a] + 1;
            for (std::size_t b = 0; b < k(); ++b) {
                std::snprintf(buf, sizeof buf, ",%.6f", values[a][b]);
                out << buf;
            }
            out << '\n';
        }
    }

    // Grayscale raster, darker cells for higher similarity; shades are
    // scaled to the largest entry.
    void write_svg(std::ostream& out, const std::string& title = "Cluster similarity") const {
        constexpr int cell = 64, margin = 80, top = 48, legend_w = 24;
        const int n = static_cast<int>(k());
        const int width = margin + n * cell + 3 * legend_w + 40;
        const int height = top + n * cell + 40;
        double vmax = 0.0;
        for (const auto& row : values)
            for (double v : row) vmax = std::max(vmax, v);
        auto shade = [vmax](double v) { return vmax > 0.0 ? static_cast<int>(255.0 * (1.0 - v / vmax) + 0.5) : 255; };

        char buf[256];
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
            << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
        out << "<text x=\"" << margin << "\" y=\"20\" font-size=\"14\">" << title << "</text>\n";
        for (int a = 0; a < n; ++a) {
            std::snprintf(buf, sizeof buf, "<text x=\"%d\" y=\"%d\" text-anchor=\"end\">Topic %zu</text>\n",
                          margin - 6, top + a * cell + cell / 2 + 4, cluster_ids[a] + 1);
            out << buf;
            std::snprintf(buf, sizeof buf, "<text x=\"%d\" y=\"%d\" text-anchor=\"middle\">Topic %zu</text>\n",
                          margin + a * cell + cell / 2, top + n * cell + 16, cluster_ids[a] + 1);
            out << buf;
            for (int b = 0; b < n; ++b) {
                const double v = values[a][b];
                const int g = shade(v);
                std::snprintf(buf, sizeof buf,
                              "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"rgb(%d,%d,%d)\" "
                              "stroke=\"#888\"/>\n",
                              margin + b * cell, top + a * cell, cell, cell, g, g, g);
                out << buf;
                std::snprintf(buf, sizeof buf,
                              "<text x=\"%d\" y=\"%d\" text-anchor=\"middle\" fill=\"%s\">%.3f</text>\n",
                              margin + b * cell + cell / 2, top + a * cell + cell / 2 + 4, g < 128 ? "white" : "black",
                              v);
                out << buf;
            }
        }
        // legend: white (0) to black (max)
        const int lx = margin + n * cell + legend_w;
        out << "<defs><linearGradient id=\"scale\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">"
               "<stop offset=\"0\" stop-color=\"#fff\"/><stop offset=\"1\" stop-color=\"#000\"/>"
               "</linearGradient></defs>\n";
        std::snprintf(buf, sizeof buf,
                      "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"url(#scale)\" stroke=\"#888\"/>\n", lx,
                      top, legend_w, n * cell);
        out << buf;
        std::snprintf(buf, sizeof buf, "<text x=\"%d\" y=\"%d\">%.3f</text>\n", lx + legend_w + 4, top + 10, vmax);
        out << buf;
        std::snprintf(buf, sizeof buf, "<text x=\"%d\" y=\"%d\">0</text>\n", lx + legend_w + 4, top + n * cell);
        out << buf;
        out << "</svg>\n";
    }
};

// Groups clustered documents into index rows per cluster id.
inline std::vector<std::vector<std::size_t>> cluster_members(const Clustering& clustering, const TfidfIndex& index) {
    std::vector<std::vector<std::size_t>> members(clustering.k);
    for (const auto& [id, c] : clustering.assignment) {
        if (c >= clustering.k) throw DataError("clustering: cluster id out of range for '" + id + "'");
        auto row = index.row(id);
        if (!row) throw DataError("clustering: document '" + id + "' has no TF-IDF vector");
        members[c].push_back(*row);
    }
    return members;
}

inline SimilarityMatrix similarity_matrix(const Clustering& clustering, const TfidfIndex& index,
                                          SelfPairs mode = SelfPairs::Include) {
    const auto members = cluster_members(clustering, index);
    SimilarityMatrix sm;
    std::vector<std::vector<double>> sums;
    std::vector<std::size_t> sizes, nonzero;
    for (std::size_t c = 0; c < members.size(); ++c) {
        if (members[c].empty()) {
            sm.dropped.push_back(c);
            continue;
        }
        sm.cluster_ids.push_back(c);
        sums.push_back(detail::unit_sum(members[c], index));
        sizes.push_back(members[c].size());
        nonzero.push_back(detail::nonzero_members(members[c], index));
    }
    const std::size_t n = sums.size();
    sm.values.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) {
            const double v = detail::pair_average(sums[a], sums[b], sizes[a], sizes[b], a == b, nonzero[a], mode);
            sm.values[a][b] = sm.values[b][a] = v;
        }
    return sm;
}

struct SimilaritySummary {
    double intra = 0.0;
    std::optional<double> inter;  // absent with fewer than two clusters
};

// intra = mean of the diagonal, inter = mean of the strict upper triangle.
inline SimilaritySummary summarize(const SimilarityMatrix& m) {
    SimilaritySummary s;
    const std::size_t n = m.k();
    if (n == 0) return s;
    for (std::size_t a = 0; a < n; ++a) s.intra += m.values[a][a];
    s.intra /= static_cast<double>(n);
    if (n >= 2) {
        double total = 0.0;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b) total += m.values[a][b];
        s.inter = total / (static_cast<double>(n * (n - 1)) / 2.0);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Class-by-cluster cross tabulation
// ---------------------------------------------------------------------------

struct CrossTab {
    std::size_t k = 0;
    std::vector<std::vector<std::size_t>> counts;  // [class][cluster]
    std::vector<std::vector<double>> column_pct;   // share of each class within a cluster
    std::vector<std::vector<double>> row_pct;      // spread of each class across clusters
    std::vector<std::size_t> empty_columns;
    std::vector<ClassLabel> empty_rows;

    std::size_t total() const {
        std::size_t t = 0;
        for (const auto& row : counts)
            for (std::size_t c : row) t += c;
        return t;
    }

    // Distribution of class labels within each cluster, with a Total row.
    void write_distribution_csv(std::ostream& out) const {
        write_header(out, false);
        char buf[32];
        for (ClassLabel c : kAllLabels) {
            out << to_string(c);
            for (std::size_t j = 0; j < k; ++j) {
                std::snprintf(buf, sizeof buf, ",%.1f", column_pct[label_index(c)][j]);
                out << buf;
            }
            out << '\n';
        }
        out << "Total";
        for (std::size_t j = 0; j < k; ++j) {
            const bool empty = std::find(empty_columns.begin(), empty_columns.end(), j) != empty_columns.end();
            out << (empty ? ",0.0" : ",100.0");
        }
        out << '\n';
    }

    // Scattering of each class across clusters, with a Total column.
    void write_scattering_csv(std::ostream& out) const {
        write_header(out, true);
        char buf[32];
        for (ClassLabel c : kAllLabels) {
            out << to_string(c);
            for (std::size_t j = 0; j < k; ++j) {
                std::snprintf(buf, sizeof buf, ",%.1f", row_pct[label_index(c)][j]);
                out << buf;
            }
            const bool empty = std::find(empty_rows.begin(), empty_rows.end(), c) != empty_rows.end();
            out << (empty ? ",0.0" : ",100.0") << '\n';
        }
    }

    void write_counts_csv(std::ostream& out) const {
        write_header(out, true);
        for (ClassLabel c : kAllLabels) {
            out << to_string(c);
            std::size_t row_total = 0;
            for (std::size_t j = 0; j < k; ++j) {
                out << ',' << counts[label_index(c)][j];
                row_total += counts[label_index(c)][j];
            }
            out << ',' << row_total << '\n';
        }
    }

private:
    void write_header(std::ostream& out, bool total_column) const {
        out << "class";
        for (std::size_t j = 0; j < k; ++j) out << ",Topic " << j + 1;
        if (total_column) out << ",Total";
        out << '\n';
    }
};

inline CrossTab crosstab(const std::unordered_map<std::string, ClassLabel>& labels, const Clustering& clustering) {
    CrossTab t;
    t.k = clustering.k;
    const std::size_t n_classes = kAllLabels.size();
    t.counts.assign(n_classes, std::vector<std::size_t>(t.k, 0));
    for (const auto& [id, c] : clustering.assignment) {
        auto it = labels.find(id);
        if (it == labels.end()) throw DataError("crosstab: clustered document '" + id + "' has no label");
        if (c >= t.k) throw DataError("crosstab: cluster id out of range for '" + id + "'");
        ++t.counts[label_index(it->second)][c];
    }

    t.column_pct.assign(n_classes, std::vector<double>(t.k, 0.0));
    t.row_pct.assign(n_classes, std::vector<double>(t.k, 0.0));
    for (std::size_t j = 0; j < t.k; ++j) {
        std::size_t col = 0;
        for (std::size_t i = 0; i < n_classes; ++i) col += t.counts[i][j];
        if (col == 0) {
            t.empty_columns.push_back(j);
            continue;
        }
        for (std::size_t i = 0; i < n_classes; ++i)
            t.column_pct[i][j] = 100.0 * static_cast<double>(t.counts[i][j]) / static_cast<double>(col);
    }
    for (std::size_t i = 0; i < n_classes; ++i) {
        std::size_t row = 0;
        for (std::size_t j = 0; j < t.k; ++j) row += t.counts[i][j];
        if (row == 0) {
            t.empty_rows.push_back(kAllLabels[i]);
            continue;
        }
        for (std::size_t j = 0; j < t.k; ++j)
            t.row_pct[i][j] = 100.0 * static_cast<double>(t.counts[i][j]) / static_cast<double>(row);
    }
    return t;
}

}  // namespace vigil
