#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "support/fuzz.hpp"
#include "vigil/textprep.hpp"

using namespace vigil;

namespace {

const PrepConfig& cfg() {
    static const PrepConfig c = PrepConfig::defaults();
    return c;
}

Document doc(std::string id, std::string text, std::vector<std::string> tokens = {}) {
    Document d;
    d.id = std::move(id);
    d.raw_text = std::move(text);
    d.tokens = std::move(tokens);
    return d;
}

bool has_upper(const std::string& s) {
    for (char32_t c : utf8::decode(s))
        if (utf8::to_lower(c) != c) return true;
    return false;
}

}  // namespace

TEST(Resources, EmbeddedCopiesMatchDataFiles) {
    EXPECT_EQ(read_text_file(VIGIL_DATA_DIR "/lingo_pt.tsv"), resources::kLingoPt);
    EXPECT_EQ(read_text_file(VIGIL_DATA_DIR "/stopwords_pt.txt"), resources::kStopwordsPt);
    EXPECT_EQ(read_text_file(VIGIL_DATA_DIR "/lemmas_pt.tsv"), resources::kLemmasPt);
}

TEST(LingoTable, DefaultTableIsLargeEnoughAndChainFree) {
    const LingoTable t = LingoTable::defaults();
    EXPECT_GE(t.size(), 38u);
    ASSERT_NE(t.lookup("abs"), nullptr);
    EXPECT_EQ(*t.lookup("abs"), "abraço");
    EXPECT_EQ(*t.lookup("blz"), "beleza");
    for (const auto& placeholder : {"url", "image", "mention", "number"}) EXPECT_EQ(t.lookup(placeholder), nullptr);
}

TEST(LingoTable, RejectsInvalidTables) {
    using Entries = std::map<std::string, std::string>;
    EXPECT_THROW(LingoTable(Entries{{"vc", "vc"}}), DataError);
    EXPECT_THROW(LingoTable(Entries{{"VC", "você"}}), DataError);
    EXPECT_THROW(LingoTable(Entries{{"q", "que"}, {"que", "quê"}}), DataError);
    EXPECT_THROW(LingoTable(Entries{{"a b", "c"}}), DataError);
    EXPECT_THROW(LingoTable::parse("x\n"), DataError);  // no expansion
}

TEST(ResourceFiles, CommentsAndBlankLinesSkipped) {
    const auto rows = parse_tab_lines("# header\n\nabs\tabraço\r\nfoo\n");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].second, "abraço");
    EXPECT_EQ(rows[1].first, "foo");
    EXPECT_THROW(read_text_file("/nonexistent/lingo.tsv"), IoError);
}

TEST(Normalize, ExpandsLingo) { EXPECT_EQ(normalize("abs blz", cfg()), "abraço beleza"); }

TEST(Normalize, ReplacesNumbers) {
    EXPECT_EQ(normalize("ES tem mais de 21 mil casos", cfg()), "es tem mais de number mil casos");
    EXPECT_EQ(normalize("2,5 mil casos em 2015.", cfg()), "number mil casos em number.");
}

TEST(Normalize, FixedPoint) { EXPECT_EQ(normalize("dengue", cfg()), "dengue"); }

TEST(Normalize, UrlAndHashtag) { EXPECT_EQ(normalize("http://t.co/x veja #Dengue", cfg()), "url veja dengue"); }

TEST(Normalize, ImagesMentionsEmoji) {
    EXPECT_EQ(normalize("foto http://x.com/a/foco.JPG?s=1", cfg()), "foto image");
    EXPECT_EQ(normalize("olha pic.twitter.com/abc123", cfg()), "olha image");
    EXPECT_EQ(normalize("@Prefeitura_RJ: foco na rua", cfg()), "mention: foco na rua");
    EXPECT_EQ(normalize("www.saude.gov.br.", cfg()), "url");
    EXPECT_EQ(normalize("dengue🦟🦟 de novo :) kkk", cfg()), "dengue de novo kkk");
    EXPECT_EQ(normalize("Eu To com dengue", cfg()), "eu estou com dengue");
}

TEST(Normalize, FlagsDisableReplacements) {
    PrepConfig c = cfg();
    c.replace_numbers = false;
    c.replace_mentions = false;
    c.replace_urls = false;
    EXPECT_EQ(normalize("@ana 21 http://t.co/x", c), "@ana 21 http://t.co/x");
    c.replace_images = false;
    c.replace_urls = true;
    EXPECT_EQ(normalize("http://x.com/a.png", c), "url");
}

TEST(Normalize, IdempotentOnFuzzedText) {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        const std::string s = fuzz::tweet(seed);
        const std::string once = normalize(s, cfg());
        EXPECT_EQ(normalize(once, cfg()), once) << "input: " << s;
    }
}

TEST(Tokenize, SplitsOnPunctuation) {
    EXPECT_EQ(tokenize("foco no mosquito!"), (std::vector<std::string>{"foco", "no", "mosquito"}));
}

TEST(Tokenize, KeepsIntraWordHyphen) {
    EXPECT_EQ(tokenize("água-parada"), (std::vector<std::string>{"água-parada"}));
    EXPECT_EQ(tokenize("-foco- a--b"), (std::vector<std::string>{"foco", "a", "b"}));
}

TEST(Tokenize, EmptyInput) { EXPECT_TRUE(tokenize("").empty()); }

TEST(Lemmatize, FixtureLexicon) {
    const Lexicon lex = load_lexicon(VIGIL_FIXTURE_DIR "/lemmas_pt.tsv");
    EXPECT_EQ(lex.size(), 50u);
    EXPECT_EQ(lemmatize({"casos"}, lex), (std::vector<std::string>{"caso"}));
    EXPECT_EQ(lemmatize({"mortes", "de", "dengue"}, lex), (std::vector<std::string>{"morte", "de", "dengue"}));
}

TEST(Lemmatize, IdentityFallbackAndEmpty) {
    EXPECT_EQ(lemmatize({"dengue"}, {}), (std::vector<std::string>{"dengue"}));
    EXPECT_TRUE(lemmatize({}, cfg().lemma_lexicon).empty());
}

TEST(Preprocess, JokeTweet) {
    const Corpus in({doc("1", "Meu WhatsApp ta tão parado que vai criar mosquito da dengue")});
    const Corpus out = preprocess(in, cfg());
    const auto& t = out[0].tokens;
    EXPECT_NE(std::find(t.begin(), t.end(), "parado"), t.end());
    EXPECT_NE(std::find(t.begin(), t.end(), "dengue"), t.end());
    EXPECT_EQ(std::find(t.begin(), t.end(), "que"), t.end());
    EXPECT_TRUE(in[0].tokens.empty()) << "input must not be mutated";
}

TEST(Preprocess, PunctuationOnlyAndEmptyCorpus) {
    const Corpus out = preprocess(Corpus({doc("1", "!!!")}), cfg());
    ASSERT_EQ(out.size(), 1u);
    EXPECT_TRUE(out[0].tokens.empty());
    EXPECT_TRUE(preprocess(Corpus(), cfg()).empty());
}

TEST(Preprocess, OutputTokensAreClean) {
    std::vector<Document> docs;
    for (std::uint64_t seed = 0; seed < 300; ++seed) docs.push_back(doc(std::to_string(seed), fuzz::tweet(seed) + "x"));
    const Corpus out = preprocess(Corpus(docs), cfg());
    EXPECT_EQ(out.size(), docs.size());
    for (const auto& d : out)
        for (const auto& t : d.tokens) {
            EXPECT_EQ(t.find('#'), std::string::npos) << t;
            EXPECT_EQ(t.find('@'), std::string::npos) << t;
            EXPECT_EQ(t.find("://"), std::string::npos) << t;
            for (char32_t ch : utf8::decode(t)) EXPECT_TRUE(ch == U'-' || !utf8::is_punct(ch)) << t;
            EXPECT_FALSE(t.starts_with("-") || t.ends_with("-")) << t;
            EXPECT_FALSE(has_upper(t)) << t;
            EXPECT_FALSE(t.empty());
        }
}

TEST(PruneVocabulary, RemovesMostFrequent) {
    const Corpus c({doc("1", "x", {"dengue", "foco"}), doc("2", "x", {"dengue", "rua", "foco"}),
                    doc("3", "x", {"dengue", "rua"})});
    const auto [out, report] = prune_vocabulary(c, 1, 1);
    for (const auto& d : out) EXPECT_EQ(std::find(d.tokens.begin(), d.tokens.end(), "dengue"), d.tokens.end());
    ASSERT_EQ(report.removed.size(), 1u);
    EXPECT_EQ(report.removed[0].term, "dengue");
    EXPECT_EQ(report.removed[0].count, 3u);
}

TEST(PruneVocabulary, RemovesTermsBelowMinDf) {
    const Corpus c({doc("1", "x", {"foco", "raro", "raro"}), doc("2", "x", {"foco"})});
    const auto [out, report] = prune_vocabulary(c, 0, 2);
    EXPECT_EQ(out[0].tokens, (std::vector<std::string>{"foco"}));
    ASSERT_EQ(report.removed.size(), 1u);
    EXPECT_EQ(report.removed[0].reason, PrunedTerm::Reason::MinDocFrequency);
}

TEST(PruneVocabulary, IdentityConfiguration) {
    const Corpus c({doc("1", "x", {"a", "b"}), doc("2", "x", {"c"})});
    const auto [out, report] = prune_vocabulary(c, 0, 1);
    EXPECT_EQ(out, c);
    EXPECT_TRUE(report.removed.empty());
}

TEST(PruneVocabulary, TieAtBoundaryKeepsLexicographicallySmallest) {
    const Corpus c({doc("1", "x", {"top", "top", "top", "b", "a", "c"})});
    const auto [out, report] = prune_vocabulary(c, 2, 1);
    EXPECT_EQ(out[0].tokens, (std::vector<std::string>{"b", "a"}));
    ASSERT_EQ(report.removed.size(), 2u);
    EXPECT_EQ(report.removed[1].term, "c");
}

TEST(PruneVocabulary, ExhaustionRemovesEverything) {
    const Corpus c({doc("1", "x", {"a", "b"})});
    const auto [out, report] = prune_vocabulary(c, 5, 1);
    EXPECT_TRUE(out[0].tokens.empty());
    EXPECT_TRUE(report.exhausted);
    EXPECT_EQ(report.removed.size(), 2u);
}

TEST(PruneVocabulary, InvariantsOnRandomCorpora) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Rng rng(seed);
        std::vector<Document> docs;
        for (std::size_t i = 0; i < 20; ++i) {
            std::vector<std::string> toks;
            for (std::size_t j = rng.below(10); j > 0; --j) toks.push_back("t" + std::to_string(rng.below(15)));
            docs.push_back(doc(std::to_string(i), "x", toks));
        }
        const Corpus c(docs);
        std::set<std::string> vocab;
        for (const auto& d : c) vocab.insert(d.tokens.begin(), d.tokens.end());
        const std::size_t top_n = rng.below(8), min_df = 1 + rng.below(4);
        const auto [out, report] = prune_vocabulary(c, top_n, min_df);

        std::size_t freq_step = 0;
        for (const auto& r : report.removed) freq_step += r.reason == PrunedTerm::Reason::TopFrequency;
        EXPECT_EQ(freq_step, std::min(top_n, vocab.size()));

        std::map<std::string, std::size_t> df;
        for (const auto& d : out) {
            std::set<std::string> seen(d.tokens.begin(), d.tokens.end());
            for (const auto& t : seen) ++df[t];
        }
        for (const auto& [t, n] : df) EXPECT_GE(n, min_df) << t;
        EXPECT_EQ(df.size(), report.vocabulary_after);
    }
}
