#include "fairweight/dataset.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

#include <json.hpp>

#include "fairweight/rng.hpp"

namespace fairweight {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool is_missing(const std::string& cell) {
    const std::string t = trim(cell);
    return t.empty() || t == "NA" || t == "N/A" || t == "na" || t == "?" || t == "nan" || t == "NaN";
}

bool parse_double(const std::string& cell, double& out) {
    const std::string t = trim(cell);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size();
}

// RFC 4180 reader: quoted fields, doubled-quote escapes, CRLF or LF records.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    // false at end of input
    bool next_record(std::vector<std::string>& fields) {
        fields.clear();
        if (in_.peek() == EOF) return false;
        std::string field;
        bool in_quotes = false;
        bool any = false;
        int ch;
        while ((ch = in_.get()) != EOF) {
            any = true;
            char c = static_cast<char>(ch);
            if (in_quotes) {
                if (c == '"') {
                    if (in_.peek() == '"') {
                        in_.get();
                        field.push_back('"');
                    } else {
                        in_quotes = false;
                    }
                } else {
                    field.push_back(c);
                }
            } else if (c == '"') {
                in_quotes = true;
            } else if (c == ',') {
                fields.push_back(field);
                field.clear();
            } else if (c == '\n') {
                break;
            } else if (c == '\r') {
                if (in_.peek() == '\n') in_.get();
                break;
            } else {
                field.push_back(c);
            }
        }
        if (!any) return false;
        fields.push_back(field);
        // skip a trailing record made of a lone newline
        if (fields.size() == 1 && fields[0].empty() && in_.peek() == EOF) return false;
        return true;
    }

private:
    std::istream& in_;
};

std::size_t find_column(const std::vector<std::string>& header, const std::string& name,
                        const std::string& origin) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (trim(header[i]) == name) return i;
    raise(Errc::MissingColumn, origin + ": column '" + name + "' not found in header");
}

} // namespace

void DatasetSchema::validate() const {
    if (target_column.empty())
        raise(Errc::InvalidSchema, "schema: target_column is empty");
    if (sensitive_columns.empty())
        raise(Errc::InvalidSchema, "schema: sensitive_columns must be non-empty");
    for (std::size_t i = 0; i < sensitive_columns.size(); ++i) {
        if (sensitive_columns[i] == target_column)
            raise(Errc::InvalidSchema, "schema: target_column '" + target_column + "' listed as sensitive");
        for (std::size_t j = i + 1; j < sensitive_columns.size(); ++j)
            if (sensitive_columns[i] == sensitive_columns[j])
                raise(Errc::InvalidSchema, "schema: sensitive column '" + sensitive_columns[i] + "' repeated");
    }
    for (const auto& f : feature_columns)
        if (f == target_column)
            raise(Errc::InvalidSchema, "schema: target_column '" + target_column + "' listed as feature");
}

DatasetSchema DatasetSchema::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::InvalidSchema, std::string("schema JSON parse error: ") + e.what());
    }
    DatasetSchema s;
    try {
        s.target_column = j.at("target_column").get<std::string>();
        if (j.at("favorable_label").is_string())
            s.favorable_label = j.at("favorable_label").get<std::string>();
        else
            s.favorable_label = j.at("favorable_label").dump();
        s.sensitive_columns = j.at("sensitive_columns").get<std::vector<std::string>>();
        if (j.contains("feature_columns"))
            s.feature_columns = j.at("feature_columns").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::InvalidSchema, std::string("schema JSON: ") + e.what());
    }
    s.validate();
    return s;
}

DatasetSchema DatasetSchema::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::IoError, "cannot open schema file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string DatasetSchema::to_json_text() const {
    nlohmann::json j;
    j["target_column"] = target_column;
    j["favorable_label"] = favorable_label;
    j["sensitive_columns"] = sensitive_columns;
    if (!feature_columns.empty()) j["feature_columns"] = feature_columns;
    return j.dump(2);
}

std::array<std::size_t, 2> Dataset::class_counts() const {
    std::array<std::size_t, 2> counts{0, 0};
    for (int y : target) counts[static_cast<std::size_t>(y)]++;
    return counts;
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
    Dataset out;
    out.n_rows = rows.size();
    out.n_features = n_features;
    out.n_sensitive = n_sensitive;
    out.code_books = code_books;
    out.feature_names = feature_names;
    out.sensitive_names = sensitive_names;
    out.features.reserve(rows.size() * n_features);
    out.target.reserve(rows.size());
    out.sensitive.reserve(rows.size() * n_sensitive);
    for (std::size_t r : rows) {
        out.features.insert(out.features.end(), features.begin() + static_cast<std::ptrdiff_t>(r * n_features),
                            features.begin() + static_cast<std::ptrdiff_t>((r + 1) * n_features));
        out.target.push_back(target[r]);
        out.sensitive.insert(out.sensitive.end(), sensitive.begin() + static_cast<std::ptrdiff_t>(r * n_sensitive),
                             sensitive.begin() + static_cast<std::ptrdiff_t>((r + 1) * n_sensitive));
    }
    return out;
}

std::vector<int> GroupIndex::group_codes(std::size_t group) const {
    std::vector<int> codes(dims.size(), 0);
    for (std::size_t k = dims.size(); k-- > 0;) {
        codes[k] = static_cast<int>(group % dims[k]);
        group /= dims[k];
    }
    return codes;
}

GroupIndex build_group_index(const Dataset& ds) {
    GroupIndex gi;
    gi.dims.resize(ds.n_sensitive);
    gi.n_groups = 1;
    for (std::size_t k = 0; k < ds.n_sensitive; ++k) {
        gi.dims[k] = ds.code_books[k].size();
        gi.n_groups *= gi.dims[k];
    }
    gi.n_slots = 2 * gi.n_groups;
    gi.group_of_row.resize(ds.n_rows);
    for (std::size_t r = 0; r < ds.n_rows; ++r) {
        std::size_t g = 0;
        for (std::size_t k = 0; k < ds.n_sensitive; ++k)
            g = g * gi.dims[k] + static_cast<std::size_t>(ds.sensitive_at(r, k));
        gi.group_of_row[r] = static_cast<int>(g);
    }
    return gi;
}

Dataset load_csv(const std::string& path, const DatasetSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::IoError, "cannot open data file: " + path);
    return load_csv_stream(in, schema, path);
}

Dataset load_csv_stream(std::istream& in, const DatasetSchema& schema, const std::string& origin) {
    schema.validate();

    CsvReader reader(in);
    std::vector<std::string> header;
    if (!reader.next_record(header))
        raise(Errc::IoError, origin + ": empty input, no header row");
    for (auto& h : header) h = trim(h);

    const std::size_t target_col = find_column(header, schema.target_column, origin);
    std::vector<std::size_t> sensitive_cols;
    for (const auto& name : schema.sensitive_columns)
        sensitive_cols.push_back(find_column(header, name, origin));

    std::vector<std::size_t> feature_cols;
    std::vector<std::string> feature_names;
    if (schema.feature_columns.empty()) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i == target_col) continue;
            feature_cols.push_back(i);
            feature_names.push_back(header[i]);
        }
    } else {
        for (const auto& name : schema.feature_columns) {
            feature_cols.push_back(find_column(header, name, origin));
            feature_names.push_back(name);
        }
    }

    // materialize all cells first; column typing needs a full pass
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> record;
    std::size_t line = 1;
    while (reader.next_record(record)) {
        ++line;
        if (record.size() != header.size())
            raise(Errc::MissingValue, origin + ": row " + std::to_string(line) + " has " +
                                          std::to_string(record.size()) + " fields, expected " +
                                          std::to_string(header.size()));
        for (std::size_t i = 0; i < record.size(); ++i)
            if (is_missing(record[i]))
                raise(Errc::MissingValue, origin + ": missing value at row " + std::to_string(line) +
                                              ", column '" + header[i] + "'");
        rows.push_back(record);
    }

    Dataset ds;
    ds.n_rows = rows.size();
    ds.n_features = feature_cols.size();
    ds.n_sensitive = sensitive_cols.size();
    ds.feature_names = feature_names;
    ds.sensitive_names = schema.sensitive_columns;

    // target: favorable -> 1; the single other raw value -> 0
    std::vector<std::string> raw_target_values;
    for (const auto& row : rows) {
        const std::string v = trim(row[target_col]);
        bool seen = false;
        for (const auto& u : raw_target_values) seen = seen || u == v;
        if (!seen) raw_target_values.push_back(v);
    }
    if (raw_target_values.size() > 2) {
        std::string got;
        for (const auto& v : raw_target_values) got += (got.empty() ? "" : ", ") + v;
        raise(Errc::NonBinaryTarget, origin + ": target column '" + schema.target_column +
                                         "' has more than two distinct values: " + got);
    }
    ds.target.reserve(ds.n_rows);
    for (const auto& row : rows)
        ds.target.push_back(trim(row[target_col]) == schema.favorable_label ? 1 : 0);

    ds.code_books.resize(ds.n_sensitive);
    ds.sensitive.reserve(ds.n_rows * ds.n_sensitive);
    for (const auto& row : rows)
        for (std::size_t k = 0; k < ds.n_sensitive; ++k)
            ds.sensitive.push_back(ds.code_books[k].intern(trim(row[sensitive_cols[k]])));

    // per-column typing: numeric if every cell parses, else first-seen coded
    ds.features.assign(ds.n_rows * ds.n_features, 0.0);
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
        const std::size_t col = feature_cols[j];
        bool numeric = true;
        double tmp;
        for (const auto& row : rows)
            if (!parse_double(row[col], tmp)) {
                numeric = false;
                break;
            }
        if (numeric) {
            for (std::size_t r = 0; r < rows.size(); ++r) {
                parse_double(rows[r][col], tmp);
                ds.features[r * ds.n_features + j] = tmp;
            }
        } else {
            CodeBook cb;
            for (std::size_t r = 0; r < rows.size(); ++r)
                ds.features[r * ds.n_features + j] = static_cast<double>(cb.intern(trim(rows[r][col])));
        }
    }
    return ds;
}

namespace {

// per-class row indices, shuffled by the given rng
std::array<std::vector<std::size_t>, 2> shuffled_class_rows(const Dataset& ds, Rng& rng) {
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t r = 0; r < ds.n_rows; ++r)
        by_class[static_cast<std::size_t>(ds.target[r])].push_back(r);
    rng.shuffle(by_class[0]);
    rng.shuffle(by_class[1]);
    return by_class;
}

} // namespace

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
    if (ds.n_rows < 10)
        raise(Errc::TooFewRows, "train_test_split: need at least 10 rows, have " + std::to_string(ds.n_rows));
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        raise(Errc::InvalidConfig, "train_test_split: test_fraction must be in (0,1)");

    Rng rng(seed);
    auto by_class = shuffled_class_rows(ds, rng);

    std::vector<std::size_t> test_rows, train_rows;
    for (std::size_t c = 0; c < 2; ++c) {
        const std::size_t n_c = by_class[c].size();
        const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n_c) * test_fraction));
        if (n_c == 0 || n_test == 0 || n_test == n_c)
            raise(Errc::DegenerateSplit, "train_test_split: class " + std::to_string(c) +
                                             " would be absent from one part");
        test_rows.insert(test_rows.end(), by_class[c].begin(), by_class[c].begin() + static_cast<std::ptrdiff_t>(n_test));
        train_rows.insert(train_rows.end(), by_class[c].begin() + static_cast<std::ptrdiff_t>(n_test), by_class[c].end());
    }
    rng.shuffle(train_rows);
    rng.shuffle(test_rows);
    return {ds.subset(train_rows), ds.subset(test_rows)};
}

std::vector<FoldIndices> kfold_indices(const Dataset& ds, std::size_t k, std::uint64_t seed) {
    if (k < 2) raise(Errc::InvalidConfig, "kfold: k must be >= 2");
    auto counts = ds.class_counts();
    if (counts[0] < k || counts[1] < k)
        raise(Errc::TooFewRows, "kfold: each class needs at least k=" + std::to_string(k) + " rows (have " +
                                    std::to_string(counts[0]) + "/" + std::to_string(counts[1]) + ")");

    Rng rng(seed);
    auto by_class = shuffled_class_rows(ds, rng);

    // deal each class round-robin so folds stay stratified
    std::vector<std::vector<std::size_t>> fold_rows(k);
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < by_class[c].size(); ++i)
            fold_rows[i % k].push_back(by_class[c][i]);

    std::vector<FoldIndices> folds(k);
    for (std::size_t f = 0; f < k; ++f) {
        folds[f].val_rows = fold_rows[f];
        for (std::size_t g = 0; g < k; ++g)
            if (g != f)
                folds[f].train_rows.insert(folds[f].train_rows.end(), fold_rows[g].begin(), fold_rows[g].end());
    }
    return folds;
}

std::vector<std::pair<Dataset, Dataset>> kfold(const Dataset& ds, std::size_t k, std::uint64_t seed) {
    std::vector<std::pair<Dataset, Dataset>> out;
    for (const auto& f : kfold_indices(ds, k, seed))
        out.emplace_back(ds.subset(f.train_rows), ds.subset(f.val_rows));
    return out;
}

Dataset undersample(const Dataset& ds, std::uint64_t seed) {
    auto counts = ds.class_counts();
    if (counts[0] == 0 || counts[1] == 0)
        raise(Errc::SingleClass, "undersample: both classes must be present");

    const std::size_t majority = counts[0] >= counts[1] ? 0 : 1;
    const std::size_t keep = std::min(counts[0], counts[1]);

    std::vector<std::size_t> majority_rows;
    for (std::size_t r = 0; r < ds.n_rows; ++r)
        if (static_cast<std::size_t>(ds.target[r]) == majority) majority_rows.push_back(r);

    Rng rng(seed);
    rng.shuffle(majority_rows);
    majority_rows.resize(keep);
    std::sort(majority_rows.begin(), majority_rows.end());

    // merge kept majority rows with all minority rows, preserving row order
    std::vector<std::size_t> kept;
    std::size_t mi = 0;
    for (std::size_t r = 0; r < ds.n_rows; ++r) {
        if (static_cast<std::size_t>(ds.target[r]) != majority) {
            kept.push_back(r);
        } else if (mi < majority_rows.size() && majority_rows[mi] == r) {
            kept.push_back(r);
            ++mi;
        }
    }
    return ds.subset(kept);
}

} // namespace fairweight
