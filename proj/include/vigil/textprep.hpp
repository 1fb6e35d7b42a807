#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
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
#include "vigil/resources.hpp"
#include "vigil/utf8.hpp"

namespace vigil {

// ---------------------------------------------------------------------------
// Line-oriented resource files
// ---------------------------------------------------------------------------

// Parses "key<TAB>value" lines; blank lines and '#'-prefixed comments are
// skipped. Lines without a tab yield an empty value.
inline std::vector<std::pair<std::string, std::string>> parse_tab_lines(std::string_view text,
                                                                        std::string_view source = "<memory>") {
    std::vector<std::pair<std::string, std::string>> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        auto tab = line.find('\t');
        std::string key = line.substr(0, tab);
        std::string value = tab == std::string::npos ? std::string() : line.substr(tab + 1);
        if (key.empty())
            throw DataError(std::string(source) + ":" + std::to_string(line_no) + ": empty key");
        rows.emplace_back(std::move(key), std::move(value));
    }
    return rows;
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

using Lexicon = std::unordered_map<std::string, std::string>;
using StopwordSet = std::unordered_set<std::string>;

inline Lexicon parse_lexicon(std::string_view text, std::string_view source = "<memory>") {
    Lexicon lex;
    for (auto& [k, v] : parse_tab_lines(text, source)) {
        if (v.empty()) throw DataError(std::string(source) + ": entry '" + k + "' has no lemma");
        lex.insert_or_assign(std::move(k), std::move(v));
    }
    return lex;
}

inline StopwordSet parse_stopwords(std::string_view text, std::string_view source = "<memory>") {
    StopwordSet words;
    for (auto& [k, v] : parse_tab_lines(text, source)) words.insert(std::move(k));
    return words;
}

inline Lexicon load_lexicon(const std::filesystem::path& p) { return parse_lexicon(read_text_file(p), p.string()); }
inline StopwordSet load_stopwords(const std::filesystem::path& p) {
    return parse_stopwords(read_text_file(p), p.string());
}

// ---------------------------------------------------------------------------
// Lingo table
// ---------------------------------------------------------------------------

// Abbreviation -> expansion map. Expansion is a single pass: no expansion
// word may itself be a key, so normalization cannot chain rewrites.
class LingoTable {
public:
    LingoTable() = default;

    explicit LingoTable(std::map<std::string, std::string> entries) : entries_(std::move(entries)) {
        for (const auto& [key, expansion] : entries_) {
            if (key.empty() || utf8::lower(key) != key)
                throw DataError("lingo key '" + key + "' is not lowercase");
            if (utf8::split_space(key).size() != 1) throw DataError("lingo key '" + key + "' contains whitespace");
            if (expansion.empty() || utf8::lower(expansion) != expansion)
                throw DataError("lingo expansion for '" + key + "' is empty or not lowercase");
            if (key == expansion) throw DataError("lingo key '" + key + "' maps to itself");
        }
        for (const auto& [key, expansion] : entries_)
            for (const auto& word : utf8::split_space(expansion))
                if (entries_.contains(word))
                    throw DataError("lingo expansion '" + expansion + "' of '" + key + "' contains key '" + word + "'");
    }

    static LingoTable parse(std::string_view text, std::string_view source = "<memory>") {
        std::map<std::string, std::string> entries;
        for (auto& [k, v] : parse_tab_lines(text, source)) entries.insert_or_assign(std::move(k), std::move(v));
        return LingoTable(std::move(entries));
    }

    static LingoTable load(const std::filesystem::path& p) { return parse(read_text_file(p), p.string()); }

    static LingoTable defaults() { return parse(resources::kLingoPt, "lingo_pt.tsv"); }

    const std::string* lookup(std::string_view word) const {
        auto it = entries_.find(std::string(word));
        return it == entries_.end() ? nullptr : &it->second;
    }

    std::size_t size() const { return entries_.size(); }
    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct PrepConfig {
    LingoTable lingo;
    StopwordSet stopwords;
    Lexicon lemma_lexicon;
    bool replace_urls = true;
    bool replace_mentions = true;
    bool replace_numbers = true;
    bool replace_images = true;
    bool strip_emoticons = true;
    std::size_t prune_top_n = 20;
    std::size_t prune_min_df = 2;

    // Shipped Portuguese lingo table, stopword list and lemma lexicon.
    static PrepConfig defaults() {
        PrepConfig cfg;
        cfg.lingo = LingoTable::defaults();
        cfg.stopwords = parse_stopwords(resources::kStopwordsPt, "stopwords_pt.txt");
        cfg.lemma_lexicon = parse_lexicon(resources::kLemmasPt, "lemmas_pt.tsv");
        return cfg;
    }

    void validate() const {
        if (prune_min_df < 1) throw std::invalid_argument("prune_min_df must be >= 1");
    }
};

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_emoticon(std::string_view lowered) {
    static const std::unordered_set<std::string_view> kEmoticons = {
        ":)",  ":-)", ":(",  ":-(", ":d",  ":-d", ";)",  ";-)", ":p",  ":-p", ":'(", "<3",  "</3",
        "xd",  ":o",  ":-o", ":/",  ":-/", "=)",  "=(",  "=d",  "^^",  "^_^", "-_-", ":*",  ";*",
        ":|",  "(:",  "):",  "o/",  "\\o/", ":3", ":]",  ":[",  ";d",  ":s",  "t_t", "u_u", ":v"};
    return kEmoticons.contains(lowered);
}

enum class LinkKind { None, Url, Image };

inline bool has_image_extension(std::string_view url) {
    url = url.substr(0, url.find_first_of("?#"));
    static constexpr std::string_view kExt[] = {".jpg", ".jpeg", ".png", ".gif", ".webp", ".bmp"};
    for (auto ext : kExt)
        if (url.size() > ext.size() && url.ends_with(ext)) return true;
    return false;
}

// `s` is lowercase.
inline LinkKind classify_link(std::string_view s) {
    if (s.starts_with("pic.twitter.com/")) return LinkKind::Image;
    bool is_url = s.starts_with("www.");
    if (!is_url) {
        auto sep = s.find("://");
        if (sep != std::string_view::npos && sep > 0 && sep + 3 < s.size()) {
            is_url = s[0] >= 'a' && s[0] <= 'z';
            for (std::size_t i = 1; i < sep && is_url; ++i) {
                char c = s[i];
                is_url = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '+' || c == '.' || c == '-';
            }
        }
    }
    if (!is_url) return LinkKind::None;
    return has_image_extension(s) ? LinkKind::Image : LinkKind::Url;
}

// Digits with optional '.' or ',' group separators: 21, 2,5, 1.000.000
inline bool is_number(std::string_view s) {
    if (s.empty()) return false;
    bool prev_digit = false;
    for (char c : s) {
        if (c >= '0' && c <= '9') {
            prev_digit = true;
        } else if ((c == '.' || c == ',') && prev_digit) {
            prev_digit = false;
        } else {
            return false;
        }
    }
    return prev_digit;
}

// Splits a whitespace token into leading punctuation, core and trailing
// punctuation.
struct Affixed {
    std::u32string prefix, core, suffix;
};

inline Affixed split_affixes(const std::u32string& tok) {
    std::size_t b = 0, e = tok.size();
    while (b < e && !utf8::is_word_char(tok[b])) ++b;
    while (e > b && !utf8::is_word_char(tok[e - 1])) --e;
    return {tok.substr(0, b), tok.substr(b, e - b), tok.substr(e)};
}

inline std::u32string lower32(std::u32string s) {
    for (auto& c : s) c = utf8::to_lower(c);
    return s;
}

}  // namespace detail

// Canonicalizes a tweet: emoji and emoticons dropped, links, images,
// mentions and numbers replaced by placeholder words, lowercased, hashtag
// marks removed and lingo expanded. Output tokens are joined by one space.
// normalize(normalize(x)) == normalize(x).
inline std::string normalize(std::string_view text, const PrepConfig& cfg) {
    using namespace detail;
    std::u32string cps = utf8::decode(text);
    if (cfg.strip_emoticons)
        for (auto& c : cps)
            if (utf8::is_emoji(c)) c = U' ';

    std::string out;
    auto emit = [&out](std::u32string_view piece) {
        if (piece.empty()) return;
        if (!out.empty()) out.push_back(' ');
        out += utf8::encode(piece);
    };

    for (const std::string& raw : utf8::split_space(utf8::encode(cps))) {
        std::u32string tok = utf8::decode(raw);
        std::size_t hashes = tok.find_first_not_of(U'#');
        if (hashes == std::u32string::npos) continue;
        tok.erase(0, hashes);
        tok = lower32(std::move(tok));

        if (cfg.strip_emoticons && is_emoticon(utf8::encode(tok))) continue;

        Affixed a = split_affixes(tok);
        std::erase(a.prefix, U'#');
        const std::string core = utf8::encode(a.core);

        if (!a.core.empty()) {
            // Links may carry trailing punctuation that belongs to the URL
            // (e.g. "/"); classify on the token minus the leading affix.
            LinkKind link = classify_link(utf8::encode(a.core + a.suffix));
            if (link == LinkKind::None) link = classify_link(core);
            if (link == LinkKind::Image && !cfg.replace_images) link = LinkKind::Url;
            if (link == LinkKind::Url && !cfg.replace_urls) link = LinkKind::None;
            if (link != LinkKind::None) {
                while (!a.prefix.empty() && a.prefix.back() == U'@') a.prefix.pop_back();
                emit(a.prefix + (link == LinkKind::Image ? U"image" : U"url"));
                continue;
            }
            if (cfg.replace_mentions && !a.prefix.empty() && a.prefix.back() == U'@') {
                while (!a.prefix.empty() && a.prefix.back() == U'@') a.prefix.pop_back();
                emit(a.prefix + U"mention" + a.suffix);
                continue;
            }
            if (cfg.replace_numbers && is_number(core)) {
                emit(a.prefix + U"number" + a.suffix);
                continue;
            }
            if (const std::string* expansion = cfg.lingo.lookup(core)) {
                emit(a.prefix + utf8::decode(*expansion) + a.suffix);
                continue;
            }
        }
        emit(a.prefix + a.core + a.suffix);
    }
    return out;
}

// Splits on whitespace and punctuation; a hyphen survives only between two
// word characters ("água-parada").
inline std::vector<std::string> tokenize(std::string_view text) {
    const std::u32string cps = utf8::decode(text);
    std::vector<std::string> tokens;
    std::u32string cur;
    auto flush = [&] {
        if (!cur.empty()) tokens.push_back(utf8::encode(cur));
        cur.clear();
    };
    for (std::size_t i = 0; i < cps.size(); ++i) {
        const char32_t c = cps[i];
        if (utf8::is_word_char(c)) {
            cur.push_back(c);
        } else if (c == U'-' && !cur.empty() && i + 1 < cps.size() && utf8::is_word_char(cps[i + 1])) {
            cur.push_back(c);
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

inline std::vector<std::string> lemmatize(std::vector<std::string> tokens, const Lexicon& lexicon) {
    for (auto& t : tokens)
        if (auto it = lexicon.find(t); it != lexicon.end()) t = it->second;
    return tokens;
}

inline std::vector<std::string> remove_stopwords(std::vector<std::string> tokens, const StopwordSet& stopwords) {
    std::erase_if(tokens, [&](const std::string& t) { return stopwords.contains(t); });
    return tokens;
}

inline std::vector<std::string> prepare_tokens(std::string_view raw_text, const PrepConfig& cfg) {
    return remove_stopwords(lemmatize(tokenize(normalize(raw_text, cfg)), cfg.lemma_lexicon), cfg.stopwords);
}

// Returns a copy of the corpus with tokens derived from each raw text.
inline Corpus preprocess(const Corpus& corpus, const PrepConfig& cfg) {
    Corpus out({}, corpus.provenance());
    for (const Document& d : corpus) {
        Document copy = d;
        copy.tokens = prepare_tokens(d.raw_text, cfg);
        out.add(std::move(copy));
    }
    out.note("preprocess");
    return out;
}

// ---------------------------------------------------------------------------
// Vocabulary curation
// ---------------------------------------------------------------------------

struct PrunedTerm {
    enum class Reason { TopFrequency, MinDocFrequency };
    std::string term;
    std::size_t count = 0;     // total occurrences in the corpus
    std::size_t doc_freq = 0;  // documents containing the term
    Reason reason = Reason::TopFrequency;
};

struct PruneReport {
    std::vector<PrunedTerm> removed;
    std::size_t vocabulary_before = 0;
    std::size_t vocabulary_after = 0;
    bool exhausted = false;  // top_n exceeded the vocabulary size
};

struct PruneResult {
    Corpus corpus;
    PruneReport report;
};

// Drops the top_n most frequent terms (frequency descending; among equal
// counts the lexicographically larger terms go first, so exactly top_n are
// removed) and then every term found in fewer than min_df documents.
inline PruneResult prune_vocabulary(const Corpus& corpus, std::size_t top_n, std::size_t min_df) {
    if (min_df < 1) throw std::invalid_argument("min_df must be >= 1");
    std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> stats;  // count, df
    for (const Document& d : corpus) {
        std::unordered_set<std::string_view> seen;
        for (const auto& t : d.tokens) {
            auto& s = stats[t];
            ++s.first;
            if (seen.insert(t).second) ++s.second;
        }
    }

    std::vector<PrunedTerm> terms;
    terms.reserve(stats.size());
    for (const auto& [t, s] : stats) terms.push_back({t, s.first, s.second, PrunedTerm::Reason::TopFrequency});
    std::sort(terms.begin(), terms.end(), [](const PrunedTerm& a, const PrunedTerm& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.term > b.term;
    });

    PruneReport report;
    report.vocabulary_before = terms.size();
    report.exhausted = top_n > terms.size();
    const std::size_t n_top = std::min(top_n, terms.size());

    std::unordered_set<std::string> drop;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        PrunedTerm& t = terms[i];
        if (i < n_top) {
            t.reason = PrunedTerm::Reason::TopFrequency;
        } else if (t.doc_freq < min_df) {
            t.reason = PrunedTerm::Reason::MinDocFrequency;
        } else {
            continue;
        }
        drop.insert(t.term);
        report.removed.push_back(t);
    }
    // Report order: frequency step first, then rare terms alphabetically.
    std::stable_sort(report.removed.begin() + static_cast<std::ptrdiff_t>(n_top), report.removed.end(),
                     [](const PrunedTerm& a, const PrunedTerm& b) { return a.term < b.term; });
    report.vocabulary_after = terms.size() - drop.size();

    Corpus out({}, corpus.provenance());
    for (const Document& d : corpus) {
        Document copy = d;
        std::erase_if(copy.tokens, [&](const std::string& t) { return drop.contains(t); });
        out.add(std::move(copy));
    }
    out.note("prune_vocabulary(top_n=" + std::to_string(top_n) + ", min_df=" + std::to_string(min_df) +
             "): removed " + std::to_string(drop.size()) + " terms");
    return {std::move(out), std::move(report)};
}

}  // namespace vigil
