#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "vigil/corpus.hpp"
#include "vigil/error.hpp"

namespace vigil {

using TermId = std::uint32_t;

// Dense term index with document frequencies. Indices follow first
// occurrence in corpus order.
class Vocabulary {
public:
    Vocabulary() = default;

    // Validating constructor used by deserialization.
    Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> df, std::size_t n_docs)
        : terms_(std::move(terms)), df_(std::move(df)), n_docs_(n_docs) {
        if (terms_.size() != df_.size()) throw DataError("vocabulary: term and df counts differ");
        index_.reserve(terms_.size());
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            if (df_[i] < 1 || df_[i] > n_docs_)
                throw DataError("vocabulary: df of '" + terms_[i] + "' outside [1, n_docs]");
            if (!index_.emplace(terms_[i], static_cast<TermId>(i)).second)
                throw DataError("vocabulary: duplicate term '" + terms_[i] + "'");
        }
    }

    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }
    std::size_t n_docs() const { return n_docs_; }
    const std::string& term(TermId id) const { return terms_[id]; }
    std::size_t df(TermId id) const { return df_[id]; }
    const std::vector<std::string>& terms() const { return terms_; }

    std::optional<TermId> find(std::string_view term) const {
        auto it = index_.find(std::string(term));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    bool operator==(const Vocabulary& o) const { return terms_ == o.terms_ && df_ == o.df_ && n_docs_ == o.n_docs_; }

    // "n_docs=<N>" header, then "term<TAB>index<TAB>df" per line.
    void write_tsv(std::ostream& out) const {
        out << "n_docs=" << n_docs_ << '\n';
        for (std::size_t i = 0; i < terms_.size(); ++i) out << terms_[i] << '\t' << i << '\t' << df_[i] << '\n';
    }

    std::string to_tsv() const {
        std::ostringstream ss;
        write_tsv(ss);
        return ss.str();
    }

    static Vocabulary read_tsv(std::istream& in) {
        std::string line;
        if (!std::getline(in, line) || !line.starts_with("n_docs="))
            throw DataError("vocabulary: missing n_docs header");
        std::size_t n_docs = std::stoull(line.substr(7));
        std::vector<std::string> terms;
        std::vector<std::size_t> df;
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            auto t1 = line.find('\t');
            auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
            if (t2 == std::string::npos) throw DataError("vocabulary line " + std::to_string(line_no) + ": expected 3 fields");
            if (std::stoull(line.substr(t1 + 1, t2 - t1 - 1)) != terms.size())
                throw DataError("vocabulary line " + std::to_string(line_no) + ": index out of sequence");
            terms.push_back(line.substr(0, t1));
            df.push_back(std::stoull(line.substr(t2 + 1)));
        }
        return Vocabulary(std::move(terms), std::move(df), n_docs);
    }

    void save_tsv(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
        write_tsv(out);
        if (!out) throw IoError("write to '" + path.string() + "' failed");
    }

    static Vocabulary load_tsv(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
        return read_tsv(in);
    }

    // FNV-1a over the TSV serialization; identifies the vocabulary a model
    // was fitted against.
    std::string checksum() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : to_tsv()) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

private:
    std::vector<std::string> terms_;
    std::vector<std::size_t> df_;
    std::unordered_map<std::string, TermId> index_;
    std::size_t n_docs_ = 0;
};

inline Vocabulary build_vocabulary(const Corpus& corpus) {
    std::vector<std::string> terms;
    std::vector<std::size_t> df;
    std::unordered_map<std::string, TermId> index;
    for (const Document& d : corpus) {
        std::unordered_set<TermId> seen;
        for (const auto& t : d.tokens) {
            auto [it, inserted] = index.emplace(t, static_cast<TermId>(terms.size()));
            if (inserted) {
                terms.push_back(t);
                df.push_back(0);
            }
            if (seen.insert(it->second).second) ++df[it->second];
        }
    }
    return Vocabulary(std::move(terms), std::move(df), corpus.size());
}

// Sparse real vector with entries sorted by index; zero weights are never
// stored.
class SparseVector {
public:
    using Entry = std::pair<TermId, double>;

    SparseVector() = default;
    explicit SparseVector(std::size_t dimension) : dimension_(dimension) {}

    // Entries may be unsorted and contain repeated indices (summed).
    SparseVector(std::size_t dimension, std::vector<Entry> entries) : dimension_(dimension) {
        std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
        for (const auto& [i, w] : entries) {
            if (i >= dimension_) throw std::out_of_range("sparse vector index exceeds dimension");
            if (!entries_.empty() && entries_.back().first == i)
                entries_.back().second += w;
            else
                entries_.emplace_back(i, w);
        }
        std::erase_if(entries_, [](const Entry& e) { return e.second == 0.0; });
    }

    std::size_t dimension() const { return dimension_; }
    const std::vector<Entry>& entries() const { return entries_; }
    bool is_zero() const { return entries_.empty(); }

    double get(TermId i) const {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), i,
                                   [](const Entry& e, TermId idx) { return e.first < idx; });
        return it != entries_.end() && it->first == i ? it->second : 0.0;
    }

    double dot(const SparseVector& o) const {
        if (dimension_ != o.dimension_) throw std::invalid_argument("sparse vector dimension mismatch");
        double s = 0.0;
        auto a = entries_.begin(), b = o.entries_.begin();
        while (a != entries_.end() && b != o.entries_.end()) {
            if (a->first < b->first) {
                ++a;
            } else if (b->first < a->first) {
                ++b;
            } else {
                s += a->second * b->second;
                ++a;
                ++b;
            }
        }
        return s;
    }

    double norm() const {
        double s = 0.0;
        for (const auto& e : entries_) s += e.second * e.second;
        return std::sqrt(s);
    }

    // Unit-length copy; the zero vector stays zero.
    SparseVector normalized() const {
        SparseVector out = *this;
        const double n = norm();
        if (n > 0.0)
            for (auto& e : out.entries_) e.second /= n;
        return out;
    }

    bool operator==(const SparseVector&) const = default;

private:
    std::size_t dimension_ = 0;
    std::vector<Entry> entries_;
};

// count(t) * ln(n_docs / df(t)); out-of-vocabulary tokens are ignored.
inline SparseVector tfidf(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
    std::unordered_map<TermId, std::size_t> counts;
    for (const auto& t : tokens)
        if (auto id = vocab.find(t)) ++counts[*id];
    std::vector<SparseVector::Entry> entries;
    entries.reserve(counts.size());
    const double n = static_cast<double>(vocab.n_docs());
    for (const auto& [id, c] : counts) {
        const double w = static_cast<double>(c) * std::log(n / static_cast<double>(vocab.df(id)));
        if (w > 0.0) entries.emplace_back(id, w);
    }
    return SparseVector(vocab.size(), std::move(entries));
}

inline SparseVector tfidf(const Document& doc, const Vocabulary& vocab) { return tfidf(doc.tokens, vocab); }

// Cosine of the angle between u and v, clamped to [0, 1]; 0 when either is
// the zero vector.
inline double cosine(const SparseVector& u, const SparseVector& v) {
    if (u.dimension() != v.dimension()) throw std::invalid_argument("cosine: dimension mismatch");
    if (u.is_zero() || v.is_zero()) return 0.0;
    const double c = u.dot(v) / (u.norm() * v.norm());
    return std::clamp(c, 0.0, 1.0);
}

}  // namespace vigil
