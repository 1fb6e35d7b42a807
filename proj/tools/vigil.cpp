// vigil: command-line front end for the dengue tweet pipeline.
//
//   ingest -> prep -> train-nb / kfold / eval / predict
//                  -> lda / sweep -> cluster-sim / crosstab
//   report runs the whole analysis and writes every table and figure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vigil/vigil.hpp"

namespace fs = std::filesystem;
using namespace vigil;

namespace {

// JSON config files. Top-level keys set global options; an object keyed by
// a subcommand name sets that subcommand's options.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        nlohmann::ordered_json j;
        collect(app, j, default_also);
        return j.dump(2) + "\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError(std::string("config: ") + e.what());
        }
        if (!j.is_object()) throw DataError("config: top level must be a JSON object");
        std::vector<CLI::ConfigItem> items;
        flatten(j, {}, items);
        return items;
    }

private:
    static void collect(const CLI::App* app, nlohmann::ordered_json& j, bool default_also) {
        for (const CLI::Option* opt : app->get_options()) {
            if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
            const std::string& name = opt->get_lnames().front();
            if (opt->count() > 0) {
                const auto& r = opt->results();
                j[name] = r.size() == 1 ? nlohmann::ordered_json(r.front()) : nlohmann::ordered_json(r);
            } else if (default_also && !opt->get_default_str().empty()) {
                j[name] = opt->get_default_str();
            }
        }
        for (const CLI::App* sub : app->get_subcommands({})) {
            nlohmann::ordered_json child;
            collect(sub, child, default_also);
            if (!child.empty()) j[sub->get_name()] = std::move(child);
        }
    }

    static std::string scalar(const nlohmann::json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        return v.dump();
    }

    static void flatten(const nlohmann::json& j, std::vector<std::string> parents, std::vector<CLI::ConfigItem>& out) {
        for (const auto& [key, value] : j.items()) {
            if (value.is_object()) {
                auto path = parents;
                path.push_back(key);
                flatten(value, path, out);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (value.is_array()) {
                for (const auto& v : value) item.inputs.push_back(scalar(v));
            } else {
                item.inputs.push_back(scalar(value));
            }
            out.push_back(std::move(item));
        }
    }
};

struct Globals {
    std::uint64_t seed = 0;
    unsigned threads = 1;
    CLI::Option* seed_opt = nullptr;
};

// "-" is standard input/output.
Corpus read_corpus(const std::string& path) {
    if (path == "-") return read_jsonl(std::cin, "stdin");
    return load_jsonl(path);
}

void with_output(const std::string& path, const std::function<void(std::ostream&)>& body) {
    if (path.empty() || path == "-") {
        body(std::cout);
        std::cout.flush();
        return;
    }
    if (fs::path parent = fs::path(path).parent_path(); !parent.empty()) {
        std::error_code ec;
        fs::create_directories(parent, ec);
        if (ec) throw IoError("cannot create directory '" + parent.string() + "': " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    body(out);
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

Clustering read_clustering(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    try {
        return Clustering::read_csv(in);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

// "2..8", "4" or "2,4,6,8".
std::vector<std::size_t> parse_k_range(const std::string& spec) {
    std::vector<std::size_t> ks;
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size() || v < 1) throw CLI::ValidationError("--k", "bad k specification '" + spec + "'");
        return static_cast<std::size_t>(v);
    };
    if (auto dots = spec.find(".."); dots != std::string::npos) {
        const std::size_t lo = number(spec.substr(0, dots)), hi = number(spec.substr(dots + 2));
        if (hi < lo) throw CLI::ValidationError("--k", "empty k range '" + spec + "'");
        for (std::size_t k = lo; k <= hi; ++k) ks.push_back(k);
        return ks;
    }
    std::size_t start = 0;
    while (start <= spec.size()) {
        const std::size_t comma = spec.find(',', start);
        ks.push_back(number(spec.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return ks;
}

void require_seed(const Globals& g, const std::string& command) {
    if (g.seed_opt->count() == 0)
        throw CLI::RequiredError("--seed (" + command + " is randomized; set it here or in the config file)");
}

void note(const std::string& msg) { std::cerr << msg << '\n'; }

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct PrepOptions {
    std::string lingo, stopwords, lexicon;
    bool keep_urls = false, keep_mentions = false, keep_numbers = false, keep_images = false,
         keep_emoticons = false;

    void add(CLI::App* cmd) {
        cmd->add_option("--lingo", lingo, "Lingo table (TSV abbreviation -> expansion)");
        cmd->add_option("--stopwords", stopwords, "Stopword list, one per line");
        cmd->add_option("--lexicon", lexicon, "Lemma lexicon (TSV form -> lemma)");
        cmd->add_flag("--keep-urls", keep_urls, "Do not replace links with 'url'");
        cmd->add_flag("--keep-mentions", keep_mentions, "Do not replace @mentions with 'user'");
        cmd->add_flag("--keep-numbers", keep_numbers, "Do not replace numbers with 'num'");
        cmd->add_flag("--keep-images", keep_images, "Do not replace image links with 'image'");
        cmd->add_flag("--keep-emoticons", keep_emoticons, "Keep emoticons and emoji");
    }

    PrepConfig config() const {
        PrepConfig cfg = PrepConfig::defaults();
        if (!lingo.empty()) cfg.lingo = LingoTable::load(lingo);
        if (!stopwords.empty()) cfg.stopwords = load_stopwords(stopwords);
        if (!lexicon.empty()) cfg.lemma_lexicon = load_lexicon(lexicon);
        cfg.replace_urls = !keep_urls;
        cfg.replace_mentions = !keep_mentions;
        cfg.replace_numbers = !keep_numbers;
        cfg.replace_images = !keep_images;
        cfg.strip_emoticons = !keep_emoticons;
        return cfg;
    }
};

struct LdaOptions {
    std::size_t iterations = 1000;
    std::optional<double> alpha;
    double beta = 0.01;

    void add(CLI::App* cmd) {
        cmd->add_option("--iterations", iterations, "Gibbs sweeps")->capture_default_str()->check(CLI::PositiveNumber);
        cmd->add_option("--alpha", alpha, "Document-topic prior (default 50/k)")->check(CLI::PositiveNumber);
        cmd->add_option("--beta", beta, "Topic-word prior")->capture_default_str()->check(CLI::PositiveNumber);
    }

    LdaConfig config(std::size_t k, std::uint64_t seed) const {
        LdaConfig c;
        c.k = k;
        c.alpha = alpha;
        c.beta = beta;
        c.iterations = iterations;
        c.seed = seed;
        return c;
    }
};

void write_prune_report(std::ostream& out, const PruneReport& r) {
    out << "term,count,doc_freq,reason\n";
    for (const auto& t : r.removed)
        out << t.term << ',' << t.count << ',' << t.doc_freq << ','
            << (t.reason == PrunedTerm::Reason::TopFrequency ? "top_frequency" : "min_doc_frequency") << '\n';
}

void write_similarity_outputs(const fs::path& dir, std::size_t k, const SimilarityMatrix& m) {
    const std::string stem = "similarity_k" + std::to_string(k);
    with_output((dir / (stem + ".csv")).string(), [&](std::ostream& o) { m.write_csv(o); });
    with_output((dir / (stem + ".svg")).string(), [&](std::ostream& o) {
        m.write_svg(o, "Cluster similarity, " + std::to_string(k) + " topics");
    });
}

void write_crosstabs(const fs::path& dir, const CrossTab& t) {
    with_output((dir / "distribution.csv").string(), [&](std::ostream& o) { t.write_distribution_csv(o); });
    with_output((dir / "scattering.csv").string(), [&](std::ostream& o) { t.write_scattering_csv(o); });
    with_output((dir / "counts.csv").string(), [&](std::ostream& o) { t.write_counts_csv(o); });
}

Corpus relabel(const Corpus& corpus, const NaiveBayesModel& model) {
    Corpus out({}, corpus.provenance());
    for (const Document& d : corpus) {
        Document copy = d;
        copy.gold_label = predict(model, d).label;
        out.add(std::move(copy));
    }
    out.note("labels predicted by naive Bayes");
    return out;
}

void setup_ingest(CLI::App& app) {
    auto* cmd = app.add_subcommand("ingest", "Filter a raw tweet stream by language and search keywords");
    struct Opts {
        std::string in, out = "-", lang = "pt";
        std::vector<std::string> keywords;
        bool all = false;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--in", o->in, "Raw JSONL corpus (id, text, optional lang/timestamp/label)")->required();
    cmd->add_option("--out", o->out, "Output JSONL")->capture_default_str();
    cmd->add_option("--lang", o->lang, "Language tag to keep; 'any' disables the filter")->capture_default_str();
    cmd->add_option("--keywords", o->keywords, "Search keywords (default: the dengue hashtag set)");
    cmd->add_flag("--all", o->all, "Skip the keyword filter");
    cmd->callback([o] {
        Corpus c = read_corpus(o->in);
        const std::size_t before = c.size();
        if (o->lang != "any") c = language_filter(c, o->lang);
        if (!o->all) c = keyword_filter(c, o->keywords.empty() ? KeywordSet::dengue_defaults() : KeywordSet(o->keywords));
        with_output(o->out, [&](std::ostream& out) { write_jsonl(out, c); });
        note("ingest: kept " + std::to_string(c.size()) + " of " + std::to_string(before) + " documents");
    });
}

void setup_prep(CLI::App& app) {
    auto* cmd = app.add_subcommand("prep", "Normalize, tokenize, lemmatize and optionally prune a corpus");
    struct Opts {
        std::string in, out = "-", report;
        bool prune = false;
        std::size_t top_n = 20, min_df = 2;
        PrepOptions prep;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--in", o->in, "Input JSONL corpus")->required();
    cmd->add_option("--out", o->out, "Output JSONL corpus with tokens")->capture_default_str();
    cmd->add_flag("--prune", o->prune, "Drop the most frequent and the rarest terms");
    cmd->add_option("--top-n", o->top_n, "Most frequent terms to drop")->capture_default_str();
    cmd->add_option("--min-df", o->min_df, "Minimum document frequency to keep a term")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--report", o->report, "Prune report CSV (default: <out>.prune.csv)");
    o->prep.add(cmd);
    cmd->callback([o] {
        Corpus c = preprocess(read_corpus(o->in), o->prep.config());
        if (o->prune) {
            PruneResult r = prune_vocabulary(c, o->top_n, o->min_df);
            c = std::move(r.corpus);
            std::string report = o->report;
            if (report.empty() && o->out != "-") report = o->out + ".prune.csv";
            if (!report.empty()) with_output(report, [&](std::ostream& out) { write_prune_report(out, r.report); });
            note("prep: vocabulary " + std::to_string(r.report.vocabulary_before) + " -> " +
                 std::to_string(r.report.vocabulary_after) + " terms" +
                 (r.report.exhausted ? " (top-n exceeded the vocabulary)" : ""));
        }
        with_output(o->out, [&](std::ostream& out) { write_jsonl(out, c); });
    });
}

void setup_train(CLI::App& app) {
    auto* cmd = app.add_subcommand("train-nb", "Train a naive Bayes classifier on a labeled, prepared corpus");
    struct Opts {
        std::string in, model;
        double smoothing = 1.0;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--in", o->in, "Labeled JSONL corpus with tokens")->required();
    cmd->add_option("--model", o->model, "Output model JSON")->required();
    cmd->add_option("--smoothing", o->smoothing, "Additive smoothing")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->callback([o] {
        const Corpus c = read_corpus(o->in);
        const Vocabulary v = build_vocabulary(c);
        const NaiveBayesModel m = train(c, v, o->smoothing, labels_present(c));
        with_output(o->model, [&](std::ostream& out) { out << to_json(m).dump(1) << '\n'; });
        note("train-nb: " + std::to_string(c.size()) + " documents, " + std::to_string(v.size()) + " terms");
    });
}

void setup_predict(CLI::App& app) {
    auto* cmd = app.add_subcommand("predict", "Label a corpus with a trained classifier");
    struct Opts {
        std::string model, in, out = "-";
        bool raw = false, posterior = false;
        PrepOptions prep;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--model", o->model, "Model JSON from train-nb")->required();
    cmd->add_option("--in", o->in, "JSONL corpus with tokens")->required();
    cmd->add_option("--out", o->out, "Output JSONL; 'label' holds the prediction")->capture_default_str();
    cmd->add_flag("--raw", o->raw, "Run preprocessing on the input text first");
    cmd->add_flag("--posterior", o->posterior, "Add per-class posterior probabilities");
    o->prep.add(cmd);
    cmd->callback([o] {
        const NaiveBayesModel m = load_model(o->model);
        Corpus c = read_corpus(o->in);
        if (o->raw) c = preprocess(c, o->prep.config());
        with_output(o->out, [&](std::ostream& out) {
            for (const Document& d : c) {
                const Prediction p = predict(m, d);
                Document labeled = d;
                labeled.gold_label = p.label;
                auto j = to_json(labeled);
                if (o->posterior) {
                    nlohmann::ordered_json post;
                    for (const auto& [label, prob] : p.posterior) post[std::string(to_string(label))] = prob;
                    j["posterior"] = std::move(post);
                }
                out << j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace) << '\n';
            }
        });
    });
}

void setup_eval(CLI::App& app) {
    auto* cmd = app.add_subcommand("eval", "Score a trained classifier on a labeled corpus");
    struct Opts {
        std::string model, in, out = "-", confusion;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--model", o->model, "Model JSON from train-nb")->required();
    cmd->add_option("--in", o->in, "Labeled JSONL corpus with tokens")->required();
    cmd->add_option("--out", o->out, "Metrics CSV")->capture_default_str();
    cmd->add_option("--confusion", o->confusion, "Confusion matrix CSV");
    cmd->callback([o] {
        const EvalReport r = evaluate(load_model(o->model), read_corpus(o->in));
        with_output(o->out, [&](std::ostream& out) { r.write_csv(out); });
        if (!o->confusion.empty()) with_output(o->confusion, [&](std::ostream& out) { r.write_confusion_csv(out); });
    });
}

void setup_kfold(CLI::App& app, Globals& g) {
    auto* cmd = app.add_subcommand("kfold", "Stratified k-fold cross-validation of the classifier");
    struct Opts {
        std::string in, out = "-", confusion;
        std::size_t folds = 10;
        double smoothing = 1.0;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--in", o->in, "Labeled JSONL corpus with tokens")->required();
    cmd->add_option("--folds", o->folds, "Number of folds")->capture_default_str()->check(CLI::Range(2, 1 << 30));
    cmd->add_option("--smoothing", o->smoothing, "Additive smoothing")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--out", o->out, "Metrics CSV")->capture_default_str();
    cmd->add_option("--confusion", o->confusion, "Pooled confusion matrix CSV");
    cmd->callback([o, &g] {
        require_seed(g, "kfold");
        const EvalReport r = kfold(read_corpus(o->in), o->folds, g.seed, o->smoothing, g.threads);
        with_output(o->out, [&](std::ostream& out) { r.write_csv(out); });
        if (!o->confusion.empty()) with_output(o->confusion, [&](std::ostream& out) { r.write_confusion_csv(out); });
    });
}

void setup_lda(CLI::App& app, Globals& g) {
    auto* cmd = app.add_subcommand("lda", "Fit an LDA topic model and hard-assign documents to topics");
    struct Opts {
        std::string in, model, clusters = "-", top_words;
        std::size_t k = 4, top_n = 10;
        LdaOptions lda;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--in", o->in, "JSONL corpus with tokens")->required();
    cmd->add_option("--k", o->k, "Number of topics")->capture_default_str()->check(CLI::PositiveNumber);
    o->lda.add(cmd);
    cmd->add_option("--model", o->model, "Output model JSON (topic assignments)");
    cmd->add_option("--clusters", o->clusters, "Output clustering CSV")->capture_default_str();
    cmd->add_option("--top-words", o->top_words, "Output CSV of the highest-probability terms per topic");
    cmd->add_option("--top-n", o->top_n, "Terms per topic in --top-words")->capture_default_str();
    cmd->callback([o, &g] {
        require_seed(g, "lda");
        const Corpus c = read_corpus(o->in);
        const Vocabulary v = build_vocabulary(c);
        const LdaModel m = fit_lda(c, v, o->lda.config(o->k, g.seed));
        if (!o->model.empty()) with_output(o->model, [&](std::ostream& out) { out << to_json(m).dump(1) << '\n'; });
        if (!o->top_words.empty())
            with_output(o->top_words, [&](std::ostream& out) { write_top_words_csv(out, m, v, o->top_n); });
        with_output(o->clusters, [&](std::ostream& out) { hard_assign(m).write_csv(out); });
    });
}

void setup_sweep(CLI::App& app, Globals& g) {
    auto* cmd = app.add_subcommand("sweep", "Fit LDA for a range of k and score intra/inter cluster similarity");
    struct Opts {
        std::string in, k = "2..8", out = "-", dir;
        bool exclude_self = false;
        LdaOptions lda;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--in", o->in, "JSONL corpus with tokens")->required();
    cmd->add_option("--k", o->k, "Topic counts: a range like 2..8 or a list like 2,4,6")->capture_default_str();
    o->lda.add(cmd);
    cmd->add_option("--out", o->out, "Summary CSV (k,intra,inter,ratio)")->capture_default_str();
    cmd->add_option("--dir", o->dir, "Also write per-k similarity matrices, heatmaps and clusterings here");
    cmd->add_flag("--exclude-self", o->exclude_self, "Leave self-pairs out of intra-cluster averages");
    cmd->callback([o, &g] {
        require_seed(g, "sweep");
        const auto ks = parse_k_range(o->k);
        const Corpus c = read_corpus(o->in);
        const Vocabulary v = build_vocabulary(c);
        const auto rows = sweep(c, v, ks, o->lda.config(1, g.seed), g.threads,
                                o->exclude_self ? SelfPairs::Exclude : SelfPairs::Include);
        with_output(o->out, [&](std::ostream& out) { write_sweep_csv(out, rows); });
        if (!o->dir.empty()) {
            make_dir(o->dir);
            for (const auto& r : rows) {
                write_similarity_outputs(o->dir, r.k, r.matrix);
                with_output((fs::path(o->dir) / ("clusters_k" + std::to_string(r.k) + ".csv")).string(),
                            [&](std::ostream& out) { r.clustering.write_csv(out); });
            }
        }
    });
}

void setup_cluster_sim(CLI::App& app) {
    auto* cmd = app.add_subcommand("cluster-sim", "Similarity matrix of an existing clustering");
    struct Opts {
        std::string in, clusters, out = "-", svg, title = "Cluster similarity";
        bool exclude_self = false;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--in", o->in, "JSONL corpus with tokens")->required();
    cmd->add_option("--clusters", o->clusters, "Clustering CSV (id,cluster)")->required();
    cmd->add_option("--out", o->out, "Matrix CSV")->capture_default_str();
    cmd->add_option("--svg", o->svg, "Heatmap SVG");
    cmd->add_option("--title", o->title, "Heatmap title")->capture_default_str();
    cmd->add_flag("--exclude-self", o->exclude_self, "Leave self-pairs out of intra-cluster averages");
    cmd->callback([o] {
        const Corpus c = read_corpus(o->in);
        const TfidfIndex index(c, build_vocabulary(c));
        const SimilarityMatrix m = similarity_matrix(read_clustering(o->clusters), index,
                                                     o->exclude_self ? SelfPairs::Exclude : SelfPairs::Include);
        with_output(o->out, [&](std::ostream& out) { m.write_csv(out); });
        if (!o->svg.empty()) with_output(o->svg, [&](std::ostream& out) { m.write_svg(out, o->title); });
        const SimilaritySummary s = summarize(m);
        char buf[96];
        std::snprintf(buf, sizeof buf, "cluster-sim: intra %.6f", s.intra);
        std::string msg = buf;
        if (s.inter) {
            std::snprintf(buf, sizeof buf, ", inter %.6f", *s.inter);
            msg += buf;
        }
        note(msg);
    });
}

void setup_crosstab(CLI::App& app) {
    auto* cmd = app.add_subcommand("crosstab", "Cross-tabulate class labels against topic clusters");
    struct Opts {
        std::string labels, clusters, dir;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--labels", o->labels, "Labeled JSONL corpus, e.g. the output of predict")->required();
    cmd->add_option("--clusters", o->clusters, "Clustering CSV (id,cluster)")->required();
    cmd->add_option("--out-dir", o->dir, "Directory for distribution.csv, scattering.csv and counts.csv")->required();
    cmd->callback([o] {
        const CrossTab t = crosstab(gold_labels(read_corpus(o->labels)), read_clustering(o->clusters));
        make_dir(o->dir);
        write_crosstabs(o->dir, t);
    });
}

void setup_synth(CLI::App& app, Globals& g) {
    auto* cmd = app.add_subcommand("synth", "Generate a labeled corpus with planted class signatures");
    struct Opts {
        std::string spec, out = "-";
        std::optional<std::size_t> docs_per_class;
        std::optional<double> mix;
        bool print_spec = false;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--spec", o->spec, "Synthetic corpus spec JSON (defaults to four built-in classes)")
        ;
    cmd->add_option("--docs-per-class", o->docs_per_class, "Documents per class");
    cmd->add_option("--mix", o->mix, "Probability of drawing a background word")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--out", o->out, "Output JSONL")->capture_default_str();
    cmd->add_flag("--print-spec", o->print_spec, "Print the effective spec as JSON instead of generating");
    cmd->callback([o, &g] {
        SynthSpec s = o->spec.empty() ? SynthSpec::defaults() : load_synth_spec(o->spec);
        if (o->docs_per_class) s.docs_per_class = *o->docs_per_class;
        if (o->mix) s.mix = *o->mix;
        if (o->print_spec) {
            if (g.seed_opt->count() > 0) s.seed = g.seed;
            with_output(o->out, [&](std::ostream& out) { out << to_json(s).dump(2) << '\n'; });
            return;
        }
        require_seed(g, "synth");
        s.seed = g.seed;
        const Corpus c = generate(s);
        with_output(o->out, [&](std::ostream& out) { write_jsonl(out, c); });
    });
}

void setup_report(CLI::App& app, Globals& g) {
    auto* cmd = app.add_subcommand("report", "Run classification, topic sweep and cross-tabulation; write all outputs");
    struct Opts {
        std::string train, in, dir, k = "2..8";
        std::size_t folds = 10, crosstab_k = 4, top_n = 10;
        double smoothing = 1.0;
        bool exclude_self = false;
        LdaOptions lda;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--train", o->train, "Labeled, prepared JSONL corpus for the classifier")->required();
    cmd->add_option("--in", o->in, "Prepared JSONL corpus to cluster (default: the training corpus)");
    cmd->add_option("--out-dir", o->dir, "Output directory")->required();
    cmd->add_option("--k", o->k, "Topic counts for the similarity sweep")->capture_default_str();
    cmd->add_option("--crosstab-k", o->crosstab_k, "Topic count used for the class/cluster tables")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--folds", o->folds, "Cross-validation folds")->capture_default_str()->check(CLI::Range(2, 1 << 30));
    cmd->add_option("--smoothing", o->smoothing, "Additive smoothing")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--top-n", o->top_n, "Terms per topic in top_words.csv")->capture_default_str();
    cmd->add_flag("--exclude-self", o->exclude_self, "Leave self-pairs out of intra-cluster averages");
    o->lda.add(cmd);
    cmd->callback([o, &g] {
        require_seed(g, "report");
        auto ks = parse_k_range(o->k);
        const fs::path dir = o->dir;
        make_dir(dir);

        const Corpus labeled = read_corpus(o->train);
        const Corpus target = o->in.empty() ? labeled : read_corpus(o->in);

        const EvalReport cv = kfold(labeled, o->folds, g.seed, o->smoothing, g.threads);
        with_output((dir / "metrics.csv").string(), [&](std::ostream& out) { cv.write_csv(out); });
        with_output((dir / "confusion.csv").string(), [&](std::ostream& out) { cv.write_confusion_csv(out); });
        note("report: cross-validated accuracy " + std::to_string(cv.micro_accuracy()));

        if (std::find(ks.begin(), ks.end(), o->crosstab_k) == ks.end()) ks.push_back(o->crosstab_k);
        const Vocabulary v = build_vocabulary(target);
        const auto rows = sweep(target, v, ks, o->lda.config(1, g.seed), g.threads,
                                o->exclude_self ? SelfPairs::Exclude : SelfPairs::Include);
        with_output((dir / "similarity_summary.csv").string(), [&](std::ostream& out) { write_sweep_csv(out, rows); });
        for (const auto& r : rows) {
            write_similarity_outputs(dir, r.k, r.matrix);
            with_output((dir / ("clusters_k" + std::to_string(r.k) + ".csv")).string(),
                        [&](std::ostream& out) { r.clustering.write_csv(out); });
        }

        const auto& chosen = *std::find_if(rows.begin(), rows.end(), [&](const SweepRow& r) { return r.k == o->crosstab_k; });
        with_output((dir / "top_words.csv").string(),
                    [&](std::ostream& out) { write_top_words_csv(out, chosen.model, v, o->top_n); });
        const NaiveBayesModel model = train(labeled, build_vocabulary(labeled), o->smoothing, labels_present(labeled));
        const Corpus predicted = relabel(target, model);
        with_output((dir / "predicted.jsonl").string(), [&](std::ostream& out) { write_jsonl(out, predicted); });
        write_crosstabs(dir, crosstab(gold_labels(predicted), chosen.clustering));
    });
}

int run(int argc, char** argv) {
    CLI::App app{"Classification and topic clustering of dengue-related tweets", "vigil"};
    app.require_subcommand(1);
    app.fallthrough();
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON config file; command-line flags take precedence");

    Globals g;
    g.seed_opt = app.add_option("--seed", g.seed, "Random seed for randomized subcommands");
    app.add_option("--threads", g.threads, "Maximum worker threads")->capture_default_str()->check(CLI::PositiveNumber);

    setup_ingest(app);
    setup_prep(app);
    setup_train(app);
    setup_predict(app);
    setup_eval(app);
    setup_kfold(app, g);
    setup_lda(app, g);
    setup_sweep(app, g);
    setup_cluster_sim(app);
    setup_crosstab(app);
    setup_synth(app, g);
    setup_report(app, g);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::FileError& e) {
        std::cerr << "vigil: " << e.what() << '\n';
        return 3;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const IoError& e) {
        std::cerr << "vigil: " << e.what() << '\n';
        return 3;
    } catch (const DataError& e) {
        std::cerr << "vigil: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "vigil: " << e.what() << '\n';
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "vigil: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "vigil: " << e.what() << '\n';
        return 3;
    }
}
