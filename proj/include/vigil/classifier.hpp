#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "vigil/corpus.hpp"
#include "vigil/error.hpp"
#include "vigil/random.hpp"
#include "vigil/vectorspace.hpp"

namespace vigil {

// Multinomial Naive Bayes over token counts with additive smoothing.
struct NaiveBayesModel {
    std::vector<ClassLabel> classes;               // ascending label order
    std::vector<double> class_log_prior;           // per class
    std::vector<std::vector<double>> term_log_prob;  // [class][term id]
    double smoothing = 1.0;
    Vocabulary vocab;

    std::size_t class_slot(ClassLabel c) const {
        auto it = std::find(classes.begin(), classes.end(), c);
        if (it == classes.end()) throw std::out_of_range("class not in model");
        return static_cast<std::size_t>(it - classes.begin());
    }

    bool operator==(const NaiveBayesModel&) const = default;
};

// Estimates priors ln(n_c / n) and likelihoods
// ln((count(t, c) + s) / (tokens(c) + s|V|)) for every class in `classes`.
inline NaiveBayesModel train(const Corpus& corpus, const Vocabulary& vocab, double smoothing = 1.0,
                             std::span<const ClassLabel> classes = kAllLabels) {
    if (!(smoothing > 0.0)) throw std::invalid_argument("smoothing must be > 0");
    if (vocab.empty()) throw DataError("cannot train on an empty vocabulary");
    if (classes.empty()) throw std::invalid_argument("no classes to train");

    NaiveBayesModel m;
    m.classes.assign(classes.begin(), classes.end());
    std::sort(m.classes.begin(), m.classes.end());
    m.classes.erase(std::unique(m.classes.begin(), m.classes.end()), m.classes.end());
    m.smoothing = smoothing;
    m.vocab = vocab;

    const std::size_t n_classes = m.classes.size();
    const std::size_t v = vocab.size();
    std::vector<std::size_t> doc_count(n_classes, 0), token_total(n_classes, 0);
    std::vector<std::vector<std::size_t>> term_count(n_classes, std::vector<std::size_t>(v, 0));

    for (const Document& d : corpus) {
        if (!d.gold_label) throw DataError("training document '" + d.id + "' has no label");
        auto it = std::find(m.classes.begin(), m.classes.end(), *d.gold_label);
        if (it == m.classes.end()) continue;
        const std::size_t c = static_cast<std::size_t>(it - m.classes.begin());
        ++doc_count[c];
        for (const auto& t : d.tokens) {
            if (auto id = vocab.find(t)) {
                ++term_count[c][*id];
                ++token_total[c];
            }
        }
    }

    std::size_t n = 0;
    for (std::size_t c = 0; c < n_classes; ++c) {
        if (doc_count[c] == 0)
            throw DataError("class " + std::string(to_string(m.classes[c])) + " has no training documents");
        n += doc_count[c];
    }

    m.class_log_prior.resize(n_classes);
    m.term_log_prob.assign(n_classes, std::vector<double>(v));
    for (std::size_t c = 0; c < n_classes; ++c) {
        m.class_log_prior[c] = std::log(static_cast<double>(doc_count[c]) / static_cast<double>(n));
        const double denom = static_cast<double>(token_total[c]) + smoothing * static_cast<double>(v);
        for (std::size_t t = 0; t < v; ++t)
            m.term_log_prob[c][t] = std::log((static_cast<double>(term_count[c][t]) + smoothing) / denom);
    }
    return m;
}

struct Prediction {
    ClassLabel label = ClassLabel::News;
    std::vector<std::pair<ClassLabel, double>> posterior;  // model class order

    double probability(ClassLabel c) const {
        for (const auto& [l, p] : posterior)
            if (l == c) return p;
        return 0.0;
    }
};

// Posterior by log-sum-exp over class scores; argmax ties go to the
// earliest class in News < Joke < MosquitoFocus < Sickness.
inline Prediction predict(const NaiveBayesModel& m, const std::vector<std::string>& tokens) {
    const std::size_t n_classes = m.classes.size();
    std::vector<double> score(m.class_log_prior);
    for (const auto& t : tokens) {
        if (auto id = m.vocab.find(t))
            for (std::size_t c = 0; c < n_classes; ++c) score[c] += m.term_log_prob[c][*id];
    }

    std::size_t best = 0;
    for (std::size_t c = 1; c < n_classes; ++c)
        if (score[c] > score[best]) best = c;

    const double top = score[best];
    double z = 0.0;
    for (double s : score) z += std::exp(s - top);
    const double log_z = top + std::log(z);

    Prediction p;
    p.label = m.classes[best];
    p.posterior.reserve(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) p.posterior.emplace_back(m.classes[c], std::exp(score[c] - log_z));
    return p;
}

inline Prediction predict(const NaiveBayesModel& m, const Document& doc) { return predict(m, doc.tokens); }

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct ClassMetrics {
    ClassLabel label;
    std::size_t support = 0;  // gold count
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;  // one-vs-rest
};

// Confusion matrix (rows gold, columns predicted) and derived rates. Any
// 0/0 rate is 0. Macro averages run over classes that occur as gold or
// predicted labels.
class EvalReport {
public:
    EvalReport() = default;

    EvalReport(std::vector<ClassLabel> labels, std::vector<std::vector<std::size_t>> confusion)
        : labels_(std::move(labels)), confusion_(std::move(confusion)) {
        const std::size_t n = labels_.size();
        if (confusion_.size() != n) throw std::invalid_argument("confusion matrix shape mismatch");
        for (const auto& row : confusion_)
            if (row.size() != n) throw std::invalid_argument("confusion matrix shape mismatch");
        compute();
    }

    const std::vector<ClassLabel>& labels() const { return labels_; }
    const std::vector<std::vector<std::size_t>>& confusion() const { return confusion_; }
    const std::vector<ClassMetrics>& per_class() const { return metrics_; }
    std::size_t total() const { return total_; }
    std::size_t correct() const { return correct_; }
    double micro_accuracy() const { return total_ == 0 ? 0.0 : static_cast<double>(correct_) / static_cast<double>(total_); }
    double macro_precision() const { return macro_p_; }
    double macro_recall() const { return macro_r_; }
    double macro_f1() const { return macro_f1_; }
    double macro_accuracy() const { return macro_acc_; }

    bool operator==(const EvalReport& o) const { return labels_ == o.labels_ && confusion_ == o.confusion_; }

    // class,precision,recall,F,accuracy with one row per class followed by
    // macro and micro rows.
    void write_csv(std::ostream& out) const {
        out << "class,precision,recall,F,accuracy\n";
        char buf[160];
        for (const auto& m : metrics_) {
            std::snprintf(buf, sizeof buf, "%s,%.4f,%.4f,%.4f,%.4f\n", std::string(to_string(m.label)).c_str(),
                          m.precision, m.recall, m.f1, m.accuracy);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, "macro,%.4f,%.4f,%.4f,%.4f\n", macro_p_, macro_r_, macro_f1_, macro_acc_);
        out << buf;
        const double micro = micro_accuracy();
        std::snprintf(buf, sizeof buf, "micro,%.4f,%.4f,%.4f,%.4f\n", micro, micro, micro, micro);
        out << buf;
    }

    void write_confusion_csv(std::ostream& out) const {
        out << "gold\\predicted";
        for (ClassLabel l : labels_) out << ',' << to_string(l);
        out << '\n';
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            out << to_string(labels_[i]);
            for (std::size_t j = 0; j < labels_.size(); ++j) out << ',' << confusion_[i][j];
            out << '\n';
        }
    }

private:
    void compute() {
        const std::size_t n = labels_.size();
        total_ = correct_ = 0;
        std::vector<std::size_t> row(n, 0), col(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                total_ += confusion_[i][j];
                row[i] += confusion_[i][j];
                col[j] += confusion_[i][j];
            }
        for (std::size_t i = 0; i < n; ++i) correct_ += confusion_[i][i];

        auto ratio = [](double a, double b) { return b == 0.0 ? 0.0 : a / b; };
        metrics_.clear();
        macro_p_ = macro_r_ = macro_f1_ = macro_acc_ = 0.0;
        std::size_t active = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double tp = static_cast<double>(confusion_[i][i]);
            const double fp = static_cast<double>(col[i]) - tp;
            const double fn = static_cast<double>(row[i]) - tp;
            const double tn = static_cast<double>(total_) - tp - fp - fn;
            ClassMetrics m{labels_[i], row[i]};
            m.precision = ratio(tp, tp + fp);
            m.recall = ratio(tp, tp + fn);
            m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
            m.accuracy = ratio(tp + tn, static_cast<double>(total_));
            metrics_.push_back(m);
            if (row[i] + col[i] > 0) {
                ++active;
                macro_p_ += m.precision;
                macro_r_ += m.recall;
                macro_f1_ += m.f1;
                macro_acc_ += m.accuracy;
            }
        }
        if (active > 0) {
            const double a = static_cast<double>(active);
            macro_p_ /= a;
            macro_r_ /= a;
            macro_f1_ /= a;
            macro_acc_ /= a;
        }
    }

    std::vector<ClassLabel> labels_;
    std::vector<std::vector<std::size_t>> confusion_;
    std::vector<ClassMetrics> metrics_;
    std::size_t total_ = 0;
    std::size_t correct_ = 0;
    double macro_p_ = 0.0, macro_r_ = 0.0, macro_f1_ = 0.0, macro_acc_ = 0.0;
};

// Gold labels occurring in the corpus, in label order. Every document must
// be labeled.
inline std::vector<ClassLabel> labels_present(const Corpus& corpus) {
    std::vector<bool> seen(kAllLabels.size(), false);
    for (const Document& d : corpus) {
        if (!d.gold_label) throw DataError("document '" + d.id + "' has no label");
        seen[label_index(*d.gold_label)] = true;
    }
    std::vector<ClassLabel> out;
    for (ClassLabel c : kAllLabels)
        if (seen[label_index(c)]) out.push_back(c);
    return out;
}

namespace detail {

inline std::size_t slot_of(const std::vector<ClassLabel>& labels, ClassLabel c) {
    return static_cast<std::size_t>(std::find(labels.begin(), labels.end(), c) - labels.begin());
}

}  // namespace detail

// Scores the model on a labeled corpus. Report labels are the model classes
// plus any other gold label that occurs.
inline EvalReport evaluate(const NaiveBayesModel& m, const Corpus& corpus) {
    if (corpus.empty()) throw DataError("cannot evaluate on an empty corpus");
    std::vector<ClassLabel> labels = labels_present(corpus);
    labels.insert(labels.end(), m.classes.begin(), m.classes.end());
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

    std::vector<std::vector<std::size_t>> confusion(labels.size(), std::vector<std::size_t>(labels.size(), 0));
    for (const Document& d : corpus) {
        const Prediction p = predict(m, d);
        ++confusion[detail::slot_of(labels, *d.gold_label)][detail::slot_of(labels, p.label)];
    }
    return EvalReport(std::move(labels), std::move(confusion));
}

// Fold index for every document. Each class is shuffled with one seeded
// generator (classes in label order) and dealt round-robin, the deal
// continuing across classes so fold sizes differ by at most one.
// Leave-one-out (k == corpus size) skips the per-class size check.
inline std::vector<std::size_t> stratified_folds(const Corpus& corpus, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("k-fold needs k >= 2");
    if (k > corpus.size()) throw DataError("k-fold: k exceeds the number of documents");
    const std::vector<ClassLabel> labels = labels_present(corpus);
    std::vector<std::vector<std::size_t>> members(kAllLabels.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) members[label_index(*corpus[i].gold_label)].push_back(i);

    const bool leave_one_out = k == corpus.size();
    Rng rng(seed);
    std::vector<std::size_t> fold(corpus.size(), 0);
    std::size_t deal = 0;
    for (ClassLabel c : labels) {
        auto& idx = members[label_index(c)];
        if (!leave_one_out && idx.size() < k)
            throw DataError("class " + std::string(to_string(c)) + " has " + std::to_string(idx.size()) +
                            " documents, too few for " + std::to_string(k) + "-fold stratification");
        rng.shuffle(std::span<std::size_t>(idx));
        for (std::size_t i : idx) fold[i] = deal++ % k;
    }
    return fold;
}

// Stratified k-fold cross-validation. Each fold trains on the remaining
// folds with a vocabulary built from them; held-out predictions are pooled
// into one confusion matrix.
inline EvalReport kfold(const Corpus& corpus, std::size_t k, std::uint64_t seed, double smoothing = 1.0,
                        unsigned threads = 1) {
    const std::vector<std::size_t> fold = stratified_folds(corpus, k, seed);
    const std::vector<ClassLabel> labels = labels_present(corpus);
    const std::size_t n_labels = labels.size();
    using Matrix = std::vector<std::vector<std::size_t>>;
    std::vector<Matrix> per_fold(k, Matrix(n_labels, std::vector<std::size_t>(n_labels, 0)));

    auto run_fold = [&](std::size_t f) {
        Corpus train_set;
        for (std::size_t i = 0; i < corpus.size(); ++i)
            if (fold[i] != f) train_set.add(corpus[i]);
        const Vocabulary vocab = build_vocabulary(train_set);
        const NaiveBayesModel m = train(train_set, vocab, smoothing, labels);
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            if (fold[i] != f) continue;
            const Prediction p = predict(m, corpus[i]);
            ++per_fold[f][detail::slot_of(labels, *corpus[i].gold_label)][detail::slot_of(labels, p.label)];
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(k)));
    if (workers == 1) {
        for (std::size_t f = 0; f < k; ++f) run_fold(f);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t f = next++; f < k; f = next++) run_fold(f);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    Matrix confusion(n_labels, std::vector<std::size_t>(n_labels, 0));
    for (const auto& m : per_fold)
        for (std::size_t i = 0; i < n_labels; ++i)
            for (std::size_t j = 0; j < n_labels; ++j) confusion[i][j] += m[i][j];
    return EvalReport(labels, std::move(confusion));
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json vocabulary_to_json(const Vocabulary& v) {
    nlohmann::ordered_json j;
    j["n_docs"] = v.n_docs();
    j["terms"] = v.terms();
    std::vector<std::size_t> df(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) df[i] = v.df(static_cast<TermId>(i));
    j["df"] = df;
    return j;
}

inline Vocabulary vocabulary_from_json(const nlohmann::json& j) {
    return Vocabulary(j.at("terms").get<std::vector<std::string>>(), j.at("df").get<std::vector<std::size_t>>(),
                      j.at("n_docs").get<std::size_t>());
}

inline nlohmann::ordered_json to_json(const NaiveBayesModel& m) {
    nlohmann::ordered_json j;
    j["format"] = "vigil-naive-bayes/1";
    j["smoothing"] = m.smoothing;
    std::vector<std::string> classes;
    for (ClassLabel c : m.classes) classes.emplace_back(to_string(c));
    j["classes"] = classes;
    j["class_log_prior"] = m.class_log_prior;
    j["term_log_prob"] = m.term_log_prob;
    j["vocab"] = vocabulary_to_json(m.vocab);
    return j;
}

inline NaiveBayesModel naive_bayes_from_json(const nlohmann::json& j) {
    try {
        NaiveBayesModel m;
        m.smoothing = j.at("smoothing").get<double>();
        for (const auto& c : j.at("classes")) {
            auto label = parse_label(c.get<std::string>());
            if (!label) throw DataError("model: unknown class '" + c.get<std::string>() + "'");
            m.classes.push_back(*label);
        }
        m.class_log_prior = j.at("class_log_prior").get<std::vector<double>>();
        m.term_log_prob = j.at("term_log_prob").get<std::vector<std::vector<double>>>();
        m.vocab = vocabulary_from_json(j.at("vocab"));
        if (m.class_log_prior.size() != m.classes.size() || m.term_log_prob.size() != m.classes.size())
            throw DataError("model: class array sizes disagree");
        for (const auto& row : m.term_log_prob)
            if (row.size() != m.vocab.size()) throw DataError("model: likelihood row does not match vocabulary");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model: ") + e.what());
    }
}

inline void save_model(const NaiveBayesModel& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << to_json(m).dump() << '\n';
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

inline NaiveBayesModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return naive_bayes_from_json(j);
}

}  // namespace vigil
