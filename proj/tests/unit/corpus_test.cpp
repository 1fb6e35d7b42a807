#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <algorithm>

#include "vigil/corpus.hpp"
#include "vigil/random.hpp"

using namespace vigil;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() / ("vigil_corpus_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

Document doc(std::string id, std::string text) {
    Document d;
    d.id = std::move(id);
    d.raw_text = std::move(text);
    return d;
}

}  // namespace

TEST(ClassLabel, NamesAreStableAndCaseSensitive) {
    EXPECT_EQ(to_string(ClassLabel::MosquitoFocus), "MosquitoFocus");
    EXPECT_EQ(parse_label("Sickness"), ClassLabel::Sickness);
    EXPECT_FALSE(parse_label("sickness"));
    EXPECT_EQ(kAllLabels.size(), 4u);
}

TEST(LoadJsonl, ParsesLabelAndIgnoresUnknownFields) {
    TempDir dir;
    write_file(dir / "a.jsonl",
               "{\"id\":\"1\",\"text\":\"Eu To com dengue\",\"label\":\"Sickness\",\"user\":{\"x\":1}}\n");
    const Corpus c = load_jsonl(dir / "a.jsonl");
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].raw_text, "Eu To com dengue");
    EXPECT_EQ(c[0].gold_label, ClassLabel::Sickness);
    EXPECT_TRUE(c[0].tokens.empty());
}

TEST(LoadJsonl, EmptyFileGivesEmptyCorpus) {
    TempDir dir;
    write_file(dir / "empty.jsonl", "");
    EXPECT_TRUE(load_jsonl(dir / "empty.jsonl").empty());
}

TEST(LoadJsonl, DuplicateIdIsNamed) {
    TempDir dir;
    write_file(dir / "dup.jsonl", "{\"id\":\"7\",\"text\":\"a\"}\n{\"id\":\"7\",\"text\":\"b\"}\n");
    try {
        load_jsonl(dir / "dup.jsonl");
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("'7'"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
}

TEST(LoadJsonl, MalformedLineReportsLineNumber) {
    std::istringstream in("{\"id\":\"1\",\"text\":\"ok\"}\n{\"id\":\"2\",\"text\":\n");
    try {
        read_jsonl(in);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_EQ(std::string(e.what()).rfind("line 2", 0), 0u) << e.what();
    }
}

TEST(LoadJsonl, RejectsUnknownLabelMissingFieldsAndEmptyText) {
    std::istringstream unknown("{\"id\":\"1\",\"text\":\"x\",\"label\":\"Spam\"}\n");
    EXPECT_THROW(read_jsonl(unknown), DataError);
    std::istringstream missing("{\"text\":\"x\"}\n");
    EXPECT_THROW(read_jsonl(missing), DataError);
    std::istringstream empty_text("{\"id\":\"1\",\"text\":\"\"}\n");
    EXPECT_THROW(read_jsonl(empty_text), DataError);
}

TEST(LoadJsonl, MissingFileIsIoError) { EXPECT_THROW(load_jsonl("/nonexistent/dir/x.jsonl"), IoError); }

TEST(SaveJsonl, RoundTripIsExact) {
    TempDir dir;
    Document a = doc("1", "Eu To com dengue");
    a.gold_label = ClassLabel::Sickness;
    a.timestamp = "2015-03-01T10:00:00Z";
    Document b = doc("2", "foco no mosquito \"água\"\tparada");
    b.lang = "pt";
    b.tokens = {"foco", "mosquito", "água"};
    Document c = doc("3", "ES tem mais de 21 mil casos");
    const Corpus corpus({a, b, c});
    save_jsonl(corpus, dir / "out.jsonl");
    EXPECT_EQ(load_jsonl(dir / "out.jsonl"), corpus);
}

TEST(SaveJsonl, TokensWrittenOnlyWhenPresent) {
    std::ostringstream out;
    Document a = doc("1", "x");
    Document b = doc("2", "y");
    b.tokens = {"y"};
    write_jsonl(out, Corpus({a, b}));
    const std::string s = out.str();
    const auto nl = s.find('\n');
    EXPECT_EQ(s.substr(0, nl).find("tokens"), std::string::npos);
    EXPECT_NE(s.substr(nl).find("\"tokens\":[\"y\"]"), std::string::npos);
}

TEST(SaveJsonl, UnwritablePathIsIoError) {
    EXPECT_THROW(save_jsonl(Corpus({doc("1", "x")}), "/nonexistent/dir/out.jsonl"), IoError);
}

TEST(SaveJsonl, RandomCorporaRoundTrip) {
    static const std::vector<std::string> pieces = {"dengue", "água", "\"", "\\", "🦟", "ç", " ", "\t", "x", "#foco"};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        std::vector<Document> docs;
        const std::size_t n = rng.below(6);
        for (std::size_t i = 0; i < n; ++i) {
            Document d = doc("d" + std::to_string(i), "t");
            for (std::size_t j = rng.below(8); j > 0; --j) d.raw_text += pieces[rng.below(pieces.size())];
            if (rng.below(2)) d.gold_label = kAllLabels[rng.below(4)];
            if (rng.below(2)) d.timestamp = "2015-0" + std::to_string(1 + rng.below(9));
            if (rng.below(2)) d.lang = rng.below(2) ? "pt" : "en";
            for (std::size_t j = rng.below(4); j > 0; --j) d.tokens.push_back(pieces[rng.below(pieces.size())]);
            docs.push_back(std::move(d));
        }
        const Corpus corpus(docs);
        std::stringstream ss;
        write_jsonl(ss, corpus);
        EXPECT_EQ(read_jsonl(ss), corpus) << "seed " << seed;
    }
}

TEST(LanguageFilter, KeepsPortugueseAndUntagged) {
    Document a = doc("1", "x");
    Document b = doc("2", "y");
    b.lang = "en";
    Document c = doc("3", "z");
    c.lang = "pt";
    const Corpus out = language_filter(Corpus({a, b, c}));
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].id, "1");
    EXPECT_EQ(out[1].id, "3");
}

TEST(KeywordFilter, HashtagMatchesCaseFolded) {
    const Corpus c({doc("1", "Olha o #Dengue aqui")});
    EXPECT_EQ(keyword_filter(c, KeywordSet({"#dengue"})).size(), 1u);
}

TEST(KeywordFilter, DropsUnrelatedTextWithDefaultSet) {
    const Corpus c({doc("1", "bom dia")});
    EXPECT_TRUE(keyword_filter(c, KeywordSet::dengue_defaults()).empty());
}

TEST(KeywordFilter, PlainWordMatchesHashtagKeyword) {
    const Corpus c({doc("1", "EPIDEMIA de gripe")});
    EXPECT_EQ(keyword_filter(c, KeywordSet({"#Epidemia"})).size(), 1u);
}

TEST(KeywordFilter, AccentFoldingAndOptOut) {
    const Corpus c({doc("1", "ÁGUA parada")});
    EXPECT_EQ(keyword_filter(c, KeywordSet({"agua"})).size(), 1u);
    EXPECT_TRUE(keyword_filter(c, KeywordSet({"agua"}, false)).empty());
    EXPECT_EQ(keyword_filter(c, KeywordSet({"ÁGUA"}, false)).size(), 1u);
}

TEST(KeywordFilter, EmptyKeywordSetRejected) {
    EXPECT_THROW(KeywordSet({}), DataError);
    EXPECT_THROW(KeywordSet({"#", "##"}), DataError);
}

TEST(KeywordFilter, IdempotentAndOrderPreserving) {
    static const std::vector<std::string> words = {"dengue", "#Foco", "bom", "dia", "#morte", "Aedes", "café", "rua"};
    const KeywordSet keys = KeywordSet::dengue_defaults();
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        Rng rng(seed);
        std::vector<Document> docs;
        for (std::size_t i = 0; i < 30; ++i) {
            std::string text = words[rng.below(words.size())];
            for (std::size_t j = rng.below(4); j > 0; --j) text += " " + words[rng.below(words.size())];
            docs.push_back(doc(std::to_string(i), text));
        }
        const Corpus corpus(docs);
        const Corpus once = keyword_filter(corpus, keys);
        EXPECT_EQ(keyword_filter(once, keys), once);
        std::vector<unsigned long> positions;
        for (const auto& d : once) positions.push_back(std::stoul(d.id));
        EXPECT_TRUE(std::is_sorted(positions.begin(), positions.end()));
    }
}
