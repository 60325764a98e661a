#include "cgaudit/bibliography.h"

#include <expat.h>

#include <charconv>
#include <deque>
#include <exception>
#include <string>
#include <unordered_set>

#include "cgaudit/text.h"

namespace cgaudit {
namespace {

constexpr std::size_t kMaxNotes = 20;

// HTML Latin-1 entity names for code points 160..255, as declared by dblp.dtd.
constexpr const char *kLatin1Entities[96] = {
    "nbsp",   "iexcl",  "cent",   "pound",  "curren", "yen",    "brvbar", "sect",
    "uml",    "copy",   "ordf",   "laquo",  "not",    "shy",    "reg",    "macr",
    "deg",    "plusmn", "sup2",   "sup3",   "acute",  "micro",  "para",   "middot",
    "cedil",  "sup1",   "ordm",   "raquo",  "frac14", "frac12", "frac34", "iquest",
    "Agrave", "Aacute", "Acirc",  "Atilde", "Auml",   "Aring",  "AElig",  "Ccedil",
    "Egrave", "Eacute", "Ecirc",  "Euml",   "Igrave", "Iacute", "Icirc",  "Iuml",
    "ETH",    "Ntilde", "Ograve", "Oacute", "Ocirc",  "Otilde", "Ouml",   "times",
    "Oslash", "Ugrave", "Uacute", "Ucirc",  "Uuml",   "Yacute", "THORN",  "szlig",
    "agrave", "aacute", "acirc",  "atilde", "auml",   "aring",  "aelig",  "ccedil",
    "egrave", "eacute", "ecirc",  "euml",   "igrave", "iacute", "icirc",  "iuml",
    "eth",    "ntilde", "ograve", "oacute", "ocirc",  "otilde", "ouml",   "divide",
    "oslash", "ugrave", "uacute", "ucirc",  "uuml",   "yacute", "thorn",  "yuml",
};

const std::string &entity_dtd() {
    static const std::string dtd = [] {
        std::string s;
        for (int i = 0; i < 96; ++i) {
            s += "<!ENTITY ";
            s += kLatin1Entities[i];
            s += " \"&#";
            s += std::to_string(160 + i);
            s += ";\">\n";
        }
        return s;
    }();
    return dtd;
}

enum class Field { None, Author, Title, Year, Journal, Booktitle, Publisher, School, Series, Other };

Field field_from_tag(std::string_view tag) {
    if (tag == "author") return Field::Author;
    if (tag == "title") return Field::Title;
    if (tag == "year") return Field::Year;
    if (tag == "journal") return Field::Journal;
    if (tag == "booktitle") return Field::Booktitle;
    if (tag == "publisher") return Field::Publisher;
    if (tag == "school") return Field::School;
    if (tag == "series") return Field::Series;
    return Field::Other;
}

bool is_publication_tag(std::string_view tag) { return tag != "www" && tag != "person"; }

std::string collapse_space(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (auto token : split_whitespace(text)) {
        if (!out.empty()) out.push_back(' ');
        out.append(token);
    }
    return out;
}

std::optional<int> parse_year(std::string_view text) {
    text = trim(text);
    if (text.empty() || text.size() > 4) return std::nullopt;
    int year = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), year);
    if (ec != std::errc() || ptr != text.data() + text.size() || year <= 0) return std::nullopt;
    return year;
}

}  // namespace

std::string_view to_string(RecordKind kind) noexcept {
    switch (kind) {
    case RecordKind::Article: return "article";
    case RecordKind::Inproceedings: return "inproceedings";
    case RecordKind::Book: return "book";
    case RecordKind::Other: return "other";
    }
    return "other";
}

RecordKind record_kind_from_tag(std::string_view tag) noexcept {
    if (tag == "article") return RecordKind::Article;
    if (tag == "inproceedings") return RecordKind::Inproceedings;
    if (tag == "book") return RecordKind::Book;
    return RecordKind::Other;
}

struct BibliographyReader::Impl {
    std::istream &in;
    BibliographyOptions options;
    BibliographyTally tally;
    XML_Parser parser = nullptr;
    bool finished = false;
    std::exception_ptr pending_error;
    std::deque<ArticleRecord> ready;
    std::unordered_set<std::string> seen_keys;

    // current record state
    int depth = 0;
    bool in_record = false;
    bool record_is_publication = true;
    bool record_has_key = false;
    ArticleRecord record;
    std::optional<int> record_year;
    std::string year_text;
    std::string venue_by_field[5];
    Field field = Field::None;
    std::string text;
    std::string author_id;

    Impl(std::istream &stream, BibliographyOptions opts) : in(stream), options(std::move(opts)) {
        parser = XML_ParserCreate(nullptr);
        if (!parser) throw std::bad_alloc();
        XML_SetUserData(parser, this);
        XML_SetElementHandler(parser, &Impl::on_start, &Impl::on_end);
        XML_SetCharacterDataHandler(parser, &Impl::on_text);
        XML_SetParamEntityParsing(parser, XML_PARAM_ENTITY_PARSING_ALWAYS);
        XML_UseForeignDTD(parser, XML_TRUE);
        XML_SetExternalEntityRefHandler(parser, &Impl::on_external_entity);
    }

    ~Impl() {
        if (parser) XML_ParserFree(parser);
    }

    std::uint64_t offset() const {
        const auto index = XML_GetCurrentByteIndex(parser);
        return index < 0 ? tally.bytes_read : static_cast<std::uint64_t>(index);
    }

    void note(std::string message) {
        if (tally.notes.size() < kMaxNotes) tally.notes.push_back(std::move(message));
    }

    void fail(std::exception_ptr error) {
        if (!pending_error) pending_error = std::move(error);
        XML_StopParser(parser, XML_FALSE);
    }

    // Lenient: tally and skip. Strict: stop with a RecordError.
    void reject_record(std::uint64_t &counter, const std::string &reason) {
        const std::string key = record.corpus_key.empty() ? "<no key>" : record.corpus_key;
        if (options.mode == ParseMode::Strict) {
            fail(std::make_exception_ptr(
                RecordError("record " + key + ": " + reason + " at byte " +
                                std::to_string(offset()),
                            record.corpus_key, offset())));
            return;
        }
        ++counter;
        note("record " + key + ": " + reason + " (skipped) at byte " + std::to_string(offset()));
    }

    void begin_record(const XML_Char *name, const XML_Char **attrs) {
        in_record = true;
        record = ArticleRecord{};
        record.kind = record_kind_from_tag(name);
        record_is_publication = is_publication_tag(name);
        record_has_key = false;
        record_year.reset();
        year_text.clear();
        for (auto &v : venue_by_field) v.clear();
        for (int i = 0; attrs[i]; i += 2) {
            if (std::string_view(attrs[i]) == "key") {
                record.corpus_key = attrs[i + 1];
                record_has_key = !trim(record.corpus_key).empty();
            }
        }
    }

    void begin_field(const XML_Char *name, const XML_Char **attrs) {
        field = field_from_tag(name);
        text.clear();
        author_id.clear();
        if (field == Field::Author) {
            for (int i = 0; attrs[i]; i += 2) {
                const std::string_view attr(attrs[i]);
                if (attr == "pid" || (attr == "orcid" && author_id.empty())) author_id = attrs[i + 1];
            }
        }
    }

    void end_field() {
        switch (field) {
        case Field::Author: {
            std::string name = collapse_space(text);
            if (!name.empty()) record.authors.push_back(AuthorMention{std::move(name), author_id});
            break;
        }
        case Field::Title: record.title = collapse_space(text); break;
        case Field::Year:
            record_year = parse_year(text);
            year_text = text;
            break;
        case Field::Journal: venue_by_field[0] = collapse_space(text); break;
        case Field::Booktitle: venue_by_field[1] = collapse_space(text); break;
        case Field::Publisher: venue_by_field[2] = collapse_space(text); break;
        case Field::School: venue_by_field[3] = collapse_space(text); break;
        case Field::Series: venue_by_field[4] = collapse_space(text); break;
        default: break;
        }
        field = Field::None;
    }

    void end_record() {
        in_record = false;
        ++tally.records_seen;
        if (!record_is_publication) {
            ++tally.non_publication;
            return;
        }
        if (!record_has_key) {
            reject_record(tally.skipped_missing_key, "missing key attribute");
            return;
        }
        if (!record_year) {
            reject_record(tally.skipped_missing_year,
                          year_text.empty() ? "missing year" : "invalid year '" + year_text + "'");
            return;
        }
        record.year = *record_year;
        if (options.year_filter && !options.year_filter->contains(record.year)) {
            ++tally.filtered_out;
            return;
        }
        if (options.reject_duplicate_keys && !seen_keys.insert(record.corpus_key).second) {
            reject_record(tally.skipped_duplicate_key, "duplicate key");
            return;
        }
        for (const auto &venue : venue_by_field) {
            if (!venue.empty()) {
                record.venue = venue;
                break;
            }
        }
        if (record.authors.empty()) {
            ++tally.empty_author_lists;
            note("record " + record.corpus_key + ": no authors");
        }
        ++tally.records_yielded;
        ready.push_back(std::move(record));
    }

    static void XMLCALL on_start(void *data, const XML_Char *name, const XML_Char **attrs) {
        auto *self = static_cast<Impl *>(data);
        ++self->depth;
        if (self->depth == 2) {
            self->begin_record(name, attrs);
        } else if (self->depth == 3 && self->in_record) {
            self->begin_field(name, attrs);
        }
    }

    static void XMLCALL on_end(void *data, const XML_Char *) {
        auto *self = static_cast<Impl *>(data);
        if (self->depth == 3 && self->in_record) {
            self->end_field();
        } else if (self->depth == 2 && self->in_record) {
            self->end_record();
        }
        --self->depth;
    }

    static void XMLCALL on_text(void *data, const XML_Char *s, int len) {
        auto *self = static_cast<Impl *>(data);
        if (self->depth >= 3 && self->field != Field::None && self->field != Field::Other) {
            self->text.append(s, static_cast<std::size_t>(len));
        }
    }

    // Serves the built-in entity DTD for the document's external subset (or
    // the foreign DTD when there is no DOCTYPE). External general entities are
    // refused.
    static int XMLCALL on_external_entity(XML_Parser parser, const XML_Char *context,
                                          const XML_Char *, const XML_Char *, const XML_Char *) {
        if (context != nullptr) return XML_STATUS_ERROR;
        XML_Parser dtd_parser = XML_ExternalEntityParserCreate(parser, nullptr, nullptr);
        if (!dtd_parser) return XML_STATUS_ERROR;
        const std::string &dtd = entity_dtd();
        const auto status = XML_Parse(dtd_parser, dtd.data(), static_cast<int>(dtd.size()), XML_TRUE);
        XML_ParserFree(dtd_parser);
        return status == XML_STATUS_OK ? XML_STATUS_OK : XML_STATUS_ERROR;
    }

    // Feeds one chunk. Returns false once the document is exhausted.
    bool feed() {
        if (finished) return false;
        void *buffer = XML_GetBuffer(parser, static_cast<int>(options.chunk_size));
        if (!buffer) throw std::bad_alloc();
        in.read(static_cast<char *>(buffer), static_cast<std::streamsize>(options.chunk_size));
        const auto n = static_cast<int>(in.gcount());
        tally.bytes_read += static_cast<std::uint64_t>(n);
        const bool final = !in;
        if (in.bad()) throw std::runtime_error("read error on bibliography stream");
        if (XML_ParseBuffer(parser, n, final ? XML_TRUE : XML_FALSE) == XML_STATUS_ERROR) {
            finished = true;
            const XML_Error code = XML_GetErrorCode(parser);
            if (code != XML_ERROR_ABORTED || !pending_error) {
                const std::uint64_t at = offset();
                pending_error = std::make_exception_ptr(XmlError(
                    std::string("malformed XML: ") + XML_ErrorString(code) + " at line " +
                        std::to_string(XML_GetCurrentLineNumber(parser)) + ", byte " +
                        std::to_string(at),
                    at));
            }
            return false;
        }
        if (final) finished = true;
        return true;
    }

    std::optional<ArticleRecord> next() {
        for (;;) {
            if (!ready.empty()) {
                ArticleRecord r = std::move(ready.front());
                ready.pop_front();
                return r;
            }
            if (pending_error) {
                auto error = pending_error;
                pending_error = nullptr;
                finished = true;
                std::rethrow_exception(error);
            }
            if (!feed() && ready.empty() && !pending_error) return std::nullopt;
        }
    }
};

BibliographyReader::BibliographyReader(std::istream &in, BibliographyOptions options)
    : impl_(std::make_unique<Impl>(in, std::move(options))) {
    if (impl_->options.chunk_size == 0) throw std::invalid_argument("chunk_size must be positive");
}

BibliographyReader::~BibliographyReader() = default;

std::optional<ArticleRecord> BibliographyReader::next() { return impl_->next(); }

const BibliographyTally &BibliographyReader::tally() const noexcept { return impl_->tally; }

std::vector<ArticleRecord> parse_bibliography(std::istream &in, BibliographyOptions options,
                                              BibliographyTally *tally) {
    BibliographyReader reader(in, std::move(options));
    std::vector<ArticleRecord> records;
    while (auto record = reader.next()) records.push_back(std::move(*record));
    if (tally) *tally = reader.tally();
    return records;
}

}  // namespace cgaudit
