#pragma once

#include <cstdint>
#include <iterator>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cgaudit/name_model.h"

namespace cgaudit {

enum class RecordKind { Article, Inproceedings, Book, Other };

std::string_view to_string(RecordKind kind) noexcept;
RecordKind record_kind_from_tag(std::string_view tag) noexcept;

struct AuthorMention {
    std::string name;
    /// Corpus person identifier (DBLP `pid`/`orcid` attribute), empty when absent.
    std::string person_id;

    bool operator==(const AuthorMention &) const = default;
};

struct ArticleRecord {
    std::string corpus_key;
    int year = 0;
    std::string venue;
    std::string title;
    std::vector<AuthorMention> authors;
    RecordKind kind = RecordKind::Other;

    bool operator==(const ArticleRecord &) const = default;
};

/// Malformed XML. `byte_offset` is the position expat stopped at.
class XmlError : public std::runtime_error {
public:
    XmlError(const std::string &what, std::uint64_t byte_offset)
        : std::runtime_error(what), byte_offset_(byte_offset) {}
    std::uint64_t byte_offset() const noexcept { return byte_offset_; }

private:
    std::uint64_t byte_offset_;
};

/// A well-formed record that violates the record contract (strict mode).
class RecordError : public std::runtime_error {
public:
    RecordError(const std::string &what, std::string corpus_key, std::uint64_t byte_offset)
        : std::runtime_error(what), corpus_key_(std::move(corpus_key)), byte_offset_(byte_offset) {}
    const std::string &corpus_key() const noexcept { return corpus_key_; }
    std::uint64_t byte_offset() const noexcept { return byte_offset_; }

private:
    std::string corpus_key_;
    std::uint64_t byte_offset_;
};

struct BibliographyOptions {
    ParseMode mode = ParseMode::Lenient;
    /// When set, only records whose year is in the set are yielded.
    std::optional<std::set<int>> year_filter;
    /// Remembers every yielded key to reject duplicates. Memory grows with the
    /// number of yielded records, so it is off for unbounded streams.
    bool reject_duplicate_keys = false;
    std::size_t chunk_size = 64 * 1024;
};

struct BibliographyTally {
    std::uint64_t records_seen = 0;
    std::uint64_t records_yielded = 0;
    std::uint64_t filtered_out = 0;
    std::uint64_t skipped_missing_year = 0;
    std::uint64_t skipped_missing_key = 0;
    std::uint64_t skipped_duplicate_key = 0;
    std::uint64_t non_publication = 0;
    /// Yielded records with no author children.
    std::uint64_t empty_author_lists = 0;
    std::uint64_t bytes_read = 0;
    std::vector<std::string> notes;

    std::uint64_t skipped() const noexcept {
        return skipped_missing_year + skipped_missing_key + skipped_duplicate_key;
    }
};

/// Streaming reader over DBLP-shaped XML: a root element whose children are
/// publication records carrying a `key` attribute and `author`, `title`,
/// `year` and venue (`journal`, `booktitle`, `publisher`, `school`, `series`)
/// children. Memory is bounded by one input chunk plus the records completed
/// inside it. HTML Latin-1 entities (&uuml;, &eacute;, ...) are decoded
/// whether or not the document declares a DTD.
class BibliographyReader {
public:
    explicit BibliographyReader(std::istream &in, BibliographyOptions options = {});
    ~BibliographyReader();
    BibliographyReader(const BibliographyReader &) = delete;
    BibliographyReader &operator=(const BibliographyReader &) = delete;

    /// Next record in document order. Throws XmlError or RecordError.
    std::optional<ArticleRecord> next();

    const BibliographyTally &tally() const noexcept;

    class iterator {
    public:
        using iterator_category = std::input_iterator_tag;
        using value_type = ArticleRecord;
        using difference_type = std::ptrdiff_t;
        using pointer = const ArticleRecord *;
        using reference = const ArticleRecord &;

        iterator() = default;
        reference operator*() const { return *current_; }
        pointer operator->() const { return &*current_; }
        iterator &operator++() {
            current_ = reader_->next();
            if (!current_) reader_ = nullptr;
            return *this;
        }
        void operator++(int) { ++*this; }
        friend bool operator==(const iterator &a, const iterator &b) {
            return a.reader_ == b.reader_;
        }

    private:
        friend class BibliographyReader;
        explicit iterator(BibliographyReader *reader) : reader_(reader) { ++*this; }
        BibliographyReader *reader_ = nullptr;
        std::optional<ArticleRecord> current_;
    };

    iterator begin() { return iterator(this); }
    iterator end() { return iterator(); }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Reads every record into memory; convenience for desk-scale corpora.
std::vector<ArticleRecord> parse_bibliography(std::istream &in, BibliographyOptions options = {},
                                              BibliographyTally *tally = nullptr);

}  // namespace cgaudit
