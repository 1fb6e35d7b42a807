#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "vigil/error.hpp"
#include "vigil/utf8.hpp"

namespace vigil {

// Relevance classes, in decreasing order of how the tie-break ranks them.
enum class ClassLabel { News = 0, Joke = 1, MosquitoFocus = 2, Sickness = 3 };

inline constexpr std::array<ClassLabel, 4> kAllLabels = {ClassLabel::News, ClassLabel::Joke,
                                                         ClassLabel::MosquitoFocus, ClassLabel::Sickness};

inline constexpr std::size_t label_index(ClassLabel c) { return static_cast<std::size_t>(c); }

inline constexpr std::string_view to_string(ClassLabel c) {
    switch (c) {
        case ClassLabel::News: return "News";
        case ClassLabel::Joke: return "Joke";
        case ClassLabel::MosquitoFocus: return "MosquitoFocus";
        case ClassLabel::Sickness: return "Sickness";
    }
    return "";
}

inline std::optional<ClassLabel> parse_label(std::string_view s) {
    for (ClassLabel c : kAllLabels)
        if (to_string(c) == s) return c;
    return std::nullopt;
}

struct Document {
    std::string id;
    std::string raw_text;
    std::optional<std::string> timestamp;
    std::optional<std::string> lang;
    std::optional<ClassLabel> gold_label;
    std::vector<std::string> tokens;

    bool operator==(const Document&) const = default;
};

// Ordered collection of documents with pairwise distinct ids. Equality
// compares documents only; provenance is descriptive metadata.
class Corpus {
public:
    Corpus() = default;

    explicit Corpus(std::vector<Document> docs, std::string provenance = {})
        : provenance_(std::move(provenance)) {
        docs_.reserve(docs.size());
        for (auto& d : docs) add(std::move(d));
    }

    void add(Document doc) {
        if (doc.raw_text.empty()) throw DataError("document '" + doc.id + "' has empty text");
        auto [it, inserted] = index_.emplace(doc.id, docs_.size());
        if (!inserted) throw DataError("duplicate document id '" + doc.id + "'");
        docs_.push_back(std::move(doc));
    }

    std::span<const Document> documents() const { return docs_; }
    std::size_t size() const { return docs_.size(); }
    bool empty() const { return docs_.empty(); }
    const Document& operator[](std::size_t i) const { return docs_[i]; }
    auto begin() const { return docs_.begin(); }
    auto end() const { return docs_.end(); }

    const Document* find(std::string_view id) const {
        auto it = index_.find(std::string(id));
        return it == index_.end() ? nullptr : &docs_[it->second];
    }

    const std::string& provenance() const { return provenance_; }
    void set_provenance(std::string p) { provenance_ = std::move(p); }
    void note(std::string_view step) {
        if (!provenance_.empty()) provenance_ += "; ";
        provenance_ += step;
    }

    bool operator==(const Corpus& other) const { return docs_ == other.docs_; }

private:
    std::vector<Document> docs_;
    std::unordered_map<std::string, std::size_t> index_;
    std::string provenance_;
};

namespace detail {

inline std::string json_line_error(std::size_t line, const std::string& what) {
    return "line " + std::to_string(line) + ": " + what;
}

inline Document document_from_json(const nlohmann::json& j, std::size_t line) {
    if (!j.is_object()) throw DataError(json_line_error(line, "expected a JSON object"));
    auto required_string = [&](const char* key) {
        auto it = j.find(key);
        if (it == j.end()) throw DataError(json_line_error(line, std::string("missing \"") + key + "\""));
        if (!it->is_string()) throw DataError(json_line_error(line, std::string("\"") + key + "\" is not a string"));
        return it->get<std::string>();
    };
    auto optional_string = [&](const char* key) -> std::optional<std::string> {
        auto it = j.find(key);
        if (it == j.end() || it->is_null()) return std::nullopt;
        if (!it->is_string()) throw DataError(json_line_error(line, std::string("\"") + key + "\" is not a string"));
        return it->get<std::string>();
    };

    Document d;
    d.id = required_string("id");
    d.raw_text = required_string("text");
    d.lang = optional_string("lang");
    d.timestamp = optional_string("timestamp");
    if (auto label = optional_string("label")) {
        d.gold_label = parse_label(*label);
        if (!d.gold_label) throw DataError(json_line_error(line, "unknown label '" + *label + "'"));
    }
    if (auto it = j.find("tokens"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) throw DataError(json_line_error(line, "\"tokens\" is not an array"));
        for (const auto& t : *it) {
            if (!t.is_string()) throw DataError(json_line_error(line, "non-string token"));
            d.tokens.push_back(t.get<std::string>());
        }
    }
    return d;
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const Document& d) {
    nlohmann::ordered_json j;
    j["id"] = d.id;
    j["text"] = d.raw_text;
    if (d.lang) j["lang"] = *d.lang;
    if (d.timestamp) j["timestamp"] = *d.timestamp;
    if (d.gold_label) j["label"] = std::string(to_string(*d.gold_label));
    if (!d.tokens.empty()) j["tokens"] = d.tokens;
    return j;
}

inline Corpus read_jsonl(std::istream& in, std::string provenance = {}) {
    Corpus corpus({}, std::move(provenance));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError(detail::json_line_error(line_no, std::string("malformed JSON: ") + e.what()));
        }
        try {
            corpus.add(detail::document_from_json(j, line_no));
        } catch (const DataError& e) {
            std::string msg = e.what();
            if (msg.rfind("line ", 0) == 0) throw;
            throw DataError(detail::json_line_error(line_no, msg));
        }
    }
    return corpus;
}

inline Corpus load_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    try {
        return read_jsonl(in, "loaded from " + path.string());
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

inline void write_jsonl(std::ostream& out, const Corpus& corpus) {
    for (const Document& d : corpus)
        out << to_json(d).dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace) << '\n';
}

inline void save_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    write_jsonl(out, corpus);
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

// Keeps documents without a language tag or tagged with `lang`.
inline Corpus language_filter(const Corpus& corpus, std::string_view lang = "pt") {
    Corpus out({}, corpus.provenance());
    std::size_t kept = 0;
    for (const Document& d : corpus) {
        if (!d.lang || *d.lang == lang) {
            out.add(d);
            ++kept;
        }
    }
    out.note("language_filter(" + std::string(lang) + "): kept " + std::to_string(kept) + " of " +
             std::to_string(corpus.size()));
    return out;
}

// Search keywords, stored with the leading '#' removed and, when folding is
// on, case- and accent-folded.
class KeywordSet {
public:
    explicit KeywordSet(const std::vector<std::string>& keywords, bool folding = true) : folding_(folding) {
        for (const auto& k : keywords) {
            std::string key = prepare(k);
            if (!key.empty()) keywords_.push_back(std::move(key));
        }
        if (keywords_.empty()) throw DataError("keyword set is empty");
    }

    // Hashtags of the seed search set used to harvest the dengue stream.
    static KeywordSet dengue_defaults() {
        return KeywordSet({"#Dengue", "#suspeita", "#Aedes", "#Epidemia", "#aegypti", "#foco", "#governo",
                           "#cuidado", "#febreChikungunya", "#morte", "#parado", "#todoscontradengue",
                           "#aedesaegypti"});
    }

    const std::vector<std::string>& keywords() const { return keywords_; }
    bool folding() const { return folding_; }

    bool matches(std::string_view text) const {
        std::string haystack;
        for (auto& tok : utf8::split_space(folding_ ? utf8::fold(text) : std::string(text))) {
            std::size_t start = tok.find_first_not_of('#');
            if (start == std::string::npos) continue;
            haystack += ' ';
            haystack.append(tok, start);
        }
        for (const auto& k : keywords_)
            if (haystack.find(k) != std::string::npos) return true;
        return false;
    }

private:
    std::string prepare(std::string_view k) const {
        std::string s = folding_ ? utf8::fold(k) : std::string(k);
        std::size_t start = s.find_first_not_of('#');
        return start == std::string::npos ? std::string() : s.substr(start);
    }

    std::vector<std::string> keywords_;
    bool folding_;
};

inline Corpus keyword_filter(const Corpus& corpus, const KeywordSet& keys) {
    Corpus out({}, corpus.provenance());
    for (const Document& d : corpus)
        if (keys.matches(d.raw_text)) out.add(d);
    out.note("keyword_filter(" + std::to_string(keys.keywords().size()) + " keywords): kept " +
             std::to_string(out.size()) + " of " + std::to_string(corpus.size()));
    return out;
}

}  // namespace vigil
