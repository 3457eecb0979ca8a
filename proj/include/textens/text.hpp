#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "textens/errors.hpp"

namespace textens {

// One record of the training corpus: a phrase and its class tag.
struct LabeledPhrase {
    std::string label;
    std::string text;
};

namespace detail {

// Minimal UTF-8 decoding for the tokenizer. Returns the codepoint and
// advances i past the sequence; malformed bytes decode to U+FFFD.
inline char32_t decode_utf8(std::string_view s, std::size_t& i) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        i += 1;
        return b0;
    }
    auto cont = [&](std::size_t k) {
        return k < s.size() && (byte(k) & 0xc0) == 0x80;
    };
    if ((b0 & 0xe0) == 0xc0 && cont(i + 1)) {
        char32_t cp = ((b0 & 0x1fu) << 6) | (byte(i + 1) & 0x3fu);
        i += 2;
        return cp;
    }
    if ((b0 & 0xf0) == 0xe0 && cont(i + 1) && cont(i + 2)) {
        char32_t cp = ((b0 & 0x0fu) << 12) | ((byte(i + 1) & 0x3fu) << 6) |
                      (byte(i + 2) & 0x3fu);
        i += 3;
        return cp;
    }
    if ((b0 & 0xf8) == 0xf0 && cont(i + 1) && cont(i + 2) && cont(i + 3)) {
        char32_t cp = ((b0 & 0x07u) << 18) | ((byte(i + 1) & 0x3fu) << 12) |
                      ((byte(i + 2) & 0x3fu) << 6) | (byte(i + 3) & 0x3fu);
        i += 4;
        return cp;
    }
    i += 1;
    return 0xfffd;
}

inline void encode_utf8(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
        out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
}

// Letter/digit test. ASCII and Latin-1 letters are classified exactly;
// codepoints above U+00FF are accepted as word characters wholesale, which
// is all the Italian-language corpus needs.
inline bool is_word_char(char32_t cp) {
    if (cp < 0x80)
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
               (cp >= 'A' && cp <= 'Z');
    if (cp < 0xc0) return false;  // Latin-1 punctuation block
    if (cp == 0xd7 || cp == 0xf7) return false;  // multiply / divide signs
    return true;
}

// Case folding for ASCII and Latin-1; anything higher passes through.
inline char32_t to_lower(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    if (cp >= 0xc0 && cp <= 0xde && cp != 0xd7) return cp + 0x20;
    return cp;
}

}  // namespace detail

// Lowercase tokens split on any character that is not a letter or digit.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        char32_t cp = detail::decode_utf8(text, i);
        if (detail::is_word_char(cp)) {
            detail::encode_utf8(detail::to_lower(cp), current);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

// The ordered set of class identifiers; ordinals follow lexicographic order.
class LabelSet {
public:
    LabelSet() = default;

    explicit LabelSet(std::vector<std::string> labels) {
        std::sort(labels.begin(), labels.end());
        labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
        labels_ = std::move(labels);
        for (std::size_t i = 0; i < labels_.size(); ++i) index_[labels_[i]] = i;
    }

    static LabelSet from_corpus(const std::vector<LabeledPhrase>& corpus) {
        std::vector<std::string> labels;
        labels.reserve(corpus.size());
        for (const auto& p : corpus) labels.push_back(p.label);
        return LabelSet(std::move(labels));
    }

    std::size_t size() const { return labels_.size(); }
    const std::string& label(std::size_t ordinal) const { return labels_[ordinal]; }
    const std::vector<std::string>& labels() const { return labels_; }

    std::optional<std::size_t> find(const std::string& label) const {
        auto it = index_.find(label);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t ordinal(const std::string& label) const {
        auto found = find(label);
        if (!found) throw UnknownLabel(label);
        return *found;
    }

    bool operator==(const LabelSet& other) const { return labels_ == other.labels_; }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::size_t> index_;
};

// The ordered term set defining the feature space; one dimension per term.
class Vocabulary {
public:
    Vocabulary() = default;

    explicit Vocabulary(std::vector<std::string> terms) {
        std::sort(terms.begin(), terms.end());
        terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
        terms_ = std::move(terms);
        for (std::size_t i = 0; i < terms_.size(); ++i) index_[terms_[i]] = i;
    }

    std::size_t dim() const { return terms_.size(); }
    const std::string& term(std::size_t d) const { return terms_[d]; }
    const std::vector<std::string>& terms() const { return terms_; }

    std::optional<std::uint32_t> find(const std::string& token) const {
        auto it = index_.find(token);
        if (it == index_.end()) return std::nullopt;
        return static_cast<std::uint32_t>(it->second);
    }

    bool operator==(const Vocabulary& other) const { return terms_ == other.terms_; }

private:
    std::vector<std::string> terms_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Sparse term-frequency vector: (dimension, count) entries with strictly
// increasing dimensions and positive counts.
struct FeatureVector {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;
    std::uint32_t dim = 0;

    std::uint32_t value_at(std::uint32_t d) const {
        auto it = std::lower_bound(
            entries.begin(), entries.end(), d,
            [](const auto& e, std::uint32_t key) { return e.first < key; });
        if (it != entries.end() && it->first == d) return it->second;
        return 0;
    }

    std::uint64_t total_count() const {
        std::uint64_t n = 0;
        for (const auto& [d, c] : entries) n += c;
        return n;
    }

    bool empty() const { return entries.empty(); }

    bool operator==(const FeatureVector& other) const {
        return dim == other.dim && entries == other.entries;
    }
};

inline Vocabulary build_vocabulary(const std::vector<LabeledPhrase>& corpus) {
    if (corpus.empty()) throw EmptyCorpus();
    std::vector<std::string> terms;
    for (const auto& phrase : corpus) {
        auto tokens = tokenize(phrase.text);
        terms.insert(terms.end(), tokens.begin(), tokens.end());
    }
    if (terms.empty()) throw EmptyVocabulary();
    return Vocabulary(std::move(terms));
}

// Count in-vocabulary tokens; OOV tokens are dropped.
inline FeatureVector vectorize(const std::vector<std::string>& tokens,
                               const Vocabulary& vocab) {
    std::map<std::uint32_t, std::uint32_t> counts;
    for (const auto& tok : tokens) {
        if (auto d = vocab.find(tok)) ++counts[*d];
    }
    FeatureVector fv;
    fv.dim = static_cast<std::uint32_t>(vocab.dim());
    fv.entries.assign(counts.begin(), counts.end());
    return fv;
}

inline std::string trim(std::string_view s) {
    const char* ws = " \t\r\n";
    auto begin = s.find_first_not_of(ws);
    if (begin == std::string_view::npos) return "";
    auto end = s.find_last_not_of(ws);
    return std::string(s.substr(begin, end - begin + 1));
}

// TSV corpus reader: `label<TAB>phrase`, one record per non-empty line.
inline std::vector<LabeledPhrase> load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open for reading");
    std::vector<LabeledPhrase> corpus;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw MalformedLine(line_no, "expected label<TAB>text");
        if (line.find('\t', tab + 1) != std::string::npos)
            throw MalformedLine(line_no, "more than one tab");
        std::string label = line.substr(0, tab);
        std::string text = line.substr(tab + 1);
        if (label.empty()) throw MalformedLine(line_no, "empty label");
        if (trim(text).empty()) throw MalformedLine(line_no, "empty text");
        corpus.push_back({std::move(label), std::move(text)});
    }
    if (corpus.empty()) throw EmptyCorpus();
    return corpus;
}

inline void save_corpus(const std::vector<LabeledPhrase>& corpus,
                        const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path, "cannot open for writing");
    for (const auto& p : corpus) out << p.label << '\t' << p.text << '\n';
    if (!out) throw IoError(path, "write failed");
}

}  // namespace textens
