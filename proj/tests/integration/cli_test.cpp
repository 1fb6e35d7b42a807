#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "vigil/vigil.hpp"

namespace fs = std::filesystem;
using namespace vigil;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() /
               ("vigil-cli-" + std::to_string(::getpid()) + "-" + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }

    void TearDown() override { fs::remove_all(dir_); }

    // Runs the CLI inside the scratch directory; returns its exit status.
    int run(const std::string& args, std::string* stdout_text = nullptr) {
        const fs::path out = dir_ / "stdout.txt";
        const std::string cmd = "cd '" + dir_.string() + "' && '" VIGIL_CLI "' " + args + " > '" + out.string() +
                                "' 2> '" + (dir_ / "stderr.txt").string() + "'";
        const int status = std::system(cmd.c_str());
        if (stdout_text) *stdout_text = slurp(out);
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string slurp(const fs::path& p) const {
        std::ifstream in(p.is_absolute() ? p : dir_ / p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    void write(const std::string& name, const std::string& text) const {
        std::ofstream(dir_ / name, std::ios::binary) << text;
    }

    fs::path path(const std::string& name) const { return dir_ / name; }

    fs::path dir_;
};

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_F(Cli, ExitCodes) {
    EXPECT_EQ(run(""), 1);
    EXPECT_EQ(run("frobnicate"), 1);
    EXPECT_EQ(run("--help"), 0);
    EXPECT_EQ(run("synth --out s.jsonl"), 1);  // no seed
    EXPECT_EQ(run("prep --in missing.jsonl --out p.jsonl"), 3);
    write("bad.jsonl", "{\"id\": \"1\"}\n");
    EXPECT_EQ(run("prep --in bad.jsonl --out p.jsonl"), 2);
    write("broken.json", "{ not json");
    EXPECT_EQ(run("--config broken.json synth --seed 1"), 2);
    EXPECT_EQ(run("--config nowhere.json synth --seed 1"), 3);
    ASSERT_EQ(run("synth --seed 1 --docs-per-class 3 --out s.jsonl"), 0);
    EXPECT_EQ(run("sweep --in s.jsonl --k 5..2 --seed 1"), 1);
}

TEST_F(Cli, SynthPrepTrainPredictMatchesLibrary) {
    ASSERT_EQ(run("synth --seed 11 --docs-per-class 40 --mix 0.5 --out raw.jsonl"), 0);
    ASSERT_EQ(run("prep --in raw.jsonl --out prep.jsonl"), 0);
    ASSERT_EQ(run("train-nb --in prep.jsonl --model model.json"), 0);
    ASSERT_EQ(run("predict --model model.json --in prep.jsonl --out pred.jsonl"), 0);

    SynthSpec spec = SynthSpec::defaults();
    spec.seed = 11;
    spec.docs_per_class = 40;
    spec.mix = 0.5;
    const Corpus raw = generate(spec);
    EXPECT_EQ(load_jsonl(path("raw.jsonl")), raw);
    const Corpus prepped = preprocess(raw, PrepConfig::defaults());
    EXPECT_EQ(load_jsonl(path("prep.jsonl")), prepped);
    const NaiveBayesModel model = train(prepped, build_vocabulary(prepped), 1.0, labels_present(prepped));
    EXPECT_EQ(load_model(path("model.json")), model);

    const Corpus predicted = load_jsonl(path("pred.jsonl"));
    ASSERT_EQ(predicted.size(), prepped.size());
    for (std::size_t i = 0; i < prepped.size(); ++i) EXPECT_EQ(*predicted[i].gold_label, predict(model, prepped[i]).label);
}

TEST_F(Cli, PredictOnEmptyInput) {
    ASSERT_EQ(run("synth --seed 1 --docs-per-class 5 --out s.jsonl"), 0);
    ASSERT_EQ(run("train-nb --in s.jsonl --model m.json"), 0);
    write("empty.jsonl", "");
    std::string out;
    EXPECT_EQ(run("predict --model m.json --in empty.jsonl", &out), 0);
    EXPECT_EQ(out, "");
}

TEST_F(Cli, PrepPruneWritesReport) {
    ASSERT_EQ(run("synth --seed 4 --docs-per-class 20 --out s.jsonl"), 0);
    ASSERT_EQ(run("prep --in s.jsonl --out p.jsonl --prune --top-n 3 --min-df 1"), 0);
    const std::string report = slurp("p.jsonl.prune.csv");
    EXPECT_EQ(report.substr(0, report.find('\n')), "term,count,doc_freq,reason");
    EXPECT_EQ(count_lines(report), 4u);
    EXPECT_EQ(report.find("min_doc_frequency"), std::string::npos);
    const auto pruned = load_jsonl(path("p.jsonl"));
    EXPECT_EQ(build_vocabulary(pruned).size() + 3,
              build_vocabulary(preprocess(load_jsonl(path("s.jsonl")), PrepConfig::defaults())).size());
}

TEST_F(Cli, SweepOverTwoToEightHasSevenRows) {
    ASSERT_EQ(run("synth --seed 2 --docs-per-class 25 --mix 0.3 --out s.jsonl"), 0);
    std::string out;
    ASSERT_EQ(run("sweep --in s.jsonl --k 2..8 --iterations 50 --seed 7", &out), 0);
    EXPECT_EQ(count_lines(out), 8u);
    EXPECT_EQ(out.substr(0, out.find('\n')), "k,intra,inter,ratio");
}

TEST_F(Cli, RerunsAreByteIdentical) {
    ASSERT_EQ(run("synth --seed 5 --docs-per-class 30 --mix 0.4 --out s.jsonl"), 0);
    const std::string commands[] = {
        "synth --seed 5 --docs-per-class 30 --mix 0.4",
        "prep --in s.jsonl --prune --top-n 2",
        "kfold --in s.jsonl --folds 5 --seed 3",
        "lda --in s.jsonl --k 3 --iterations 40 --seed 3",
        "sweep --in s.jsonl --k 2..4 --iterations 40 --seed 3 --threads 2",
    };
    for (const auto& c : commands) {
        std::string first, second;
        ASSERT_EQ(run(c, &first), 0) << c;
        ASSERT_EQ(run(c, &second), 0) << c;
        EXPECT_FALSE(first.empty()) << c;
        EXPECT_EQ(first, second) << c;
    }
    std::string one, three;
    ASSERT_EQ(run("sweep --in s.jsonl --k 2..4 --iterations 40 --seed 3 --threads 1", &one), 0);
    ASSERT_EQ(run("sweep --in s.jsonl --k 2..4 --iterations 40 --seed 3 --threads 3", &three), 0);
    EXPECT_EQ(one, three);
}

TEST_F(Cli, FlagsOverrideConfigFile) {
    ASSERT_EQ(run("synth --seed 5 --docs-per-class 30 --mix 0.9 --out s.jsonl"), 0);
    write("cfg.json", R"({"seed": 8, "kfold": {"in": "s.jsonl", "folds": 4}})");
    std::string from_file, from_flags, overridden, explicit_flags;
    ASSERT_EQ(run("--config cfg.json kfold --confusion /dev/stdout", &from_file), 0);
    ASSERT_EQ(run("kfold --in s.jsonl --folds 4 --seed 8 --confusion /dev/stdout", &from_flags), 0);
    EXPECT_EQ(from_file, from_flags);
    ASSERT_EQ(run("--config cfg.json kfold --folds 3 --seed 2 --confusion /dev/stdout", &overridden), 0);
    ASSERT_EQ(run("kfold --in s.jsonl --folds 3 --seed 2 --confusion /dev/stdout", &explicit_flags), 0);
    EXPECT_EQ(overridden, explicit_flags);
}

TEST_F(Cli, LdaClusterSimAndCrosstabCompose) {
    ASSERT_EQ(run("synth --seed 6 --docs-per-class 25 --mix 0.2 --out s.jsonl"), 0);
    ASSERT_EQ(run("lda --in s.jsonl --k 4 --iterations 60 --seed 1 --clusters c.csv --model lda.json "
                  "--top-words top.csv --top-n 5"),
              0);
    std::string matrix;
    ASSERT_EQ(run("cluster-sim --in s.jsonl --clusters c.csv --svg heat.svg", &matrix), 0);
    EXPECT_EQ(count_lines(matrix), 5u);
    EXPECT_NE(slurp("heat.svg").find("</svg>"), std::string::npos);
    EXPECT_EQ(count_lines(slurp("top.csv")), 21u);

    ASSERT_EQ(run("crosstab --labels s.jsonl --clusters c.csv --out-dir tables"), 0);
    const std::string dist = slurp("tables/distribution.csv");
    EXPECT_EQ(dist.substr(0, dist.find('\n')), "class,Topic 1,Topic 2,Topic 3,Topic 4");
    EXPECT_NE(dist.find("\nTotal,"), std::string::npos);
    EXPECT_EQ(count_lines(slurp("tables/scattering.csv")), 5u);

    const Corpus corpus = load_jsonl(path("s.jsonl"));
    std::ifstream model(path("lda.json"));
    const LdaModel m = lda_from_json(nlohmann::json::parse(model), corpus, build_vocabulary(corpus));
    std::ostringstream expected;
    hard_assign(m).write_csv(expected);
    EXPECT_EQ(slurp("c.csv"), expected.str());
}

TEST_F(Cli, ReportWritesEveryArtifact) {
    ASSERT_EQ(run("synth --seed 9 --docs-per-class 20 --mix 0.3 --out s.jsonl"), 0);
    ASSERT_EQ(run("report --train s.jsonl --out-dir rep --k 2..3 --crosstab-k 4 --folds 4 --iterations 30 --seed 1"),
              0);
    for (const char* f : {"metrics.csv", "confusion.csv", "similarity_summary.csv", "similarity_k2.csv",
                          "similarity_k2.svg", "similarity_k3.svg", "similarity_k4.svg", "clusters_k4.csv",
                          "top_words.csv", "predicted.jsonl", "distribution.csv", "scattering.csv", "counts.csv"})
        EXPECT_TRUE(fs::exists(path("rep") / f)) << f;
    EXPECT_EQ(count_lines(slurp("rep/similarity_summary.csv")), 4u);
    const std::string metrics = slurp("rep/metrics.csv");
    EXPECT_EQ(metrics.substr(0, metrics.find('\n')), "class,precision,recall,F,accuracy");
}
