#include "conpredict/learn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "conpredict/common/error.hpp"

namespace conpredict::learn {

namespace {

std::vector<std::string> mutation_columns(const std::vector<std::string>& ops) {
    std::vector<std::string> out;
    for (const char* prefix : {"MuS_", "MuDuE_", "MuDuK_"})
        for (const auto& op : ops) out.push_back(prefix + op);
    return out;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

bool is_key_column(std::string_view c) {
    return c == "program" || c == "function" || c == "nloc" || c == "bugs" || c == "label";
}

}  // namespace

std::size_t Dataset::positives() const {
    return static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
}

int Dataset::feature_index(std::string_view name) const {
    for (std::size_t i = 0; i < features.size(); ++i)
        if (features[i] == name) return static_cast<int>(i);
    return -1;
}

std::size_t Dataset::require_feature(std::string_view name) const {
    const int i = feature_index(name);
    if (i < 0) throw InputError("dataset has no feature '" + std::string(name) + "'");
    return static_cast<std::size_t>(i);
}

Dataset Dataset::subset_rows(const std::vector<std::size_t>& rows) const {
    Dataset d;
    d.features = features;
    for (std::size_t r : rows) d.append_row(keys[r], x[r], y[r], nloc[r], bugs[r]);
    return d;
}

Dataset Dataset::subset_features(const std::vector<std::size_t>& columns) const {
    Dataset d;
    for (std::size_t c : columns) d.features.push_back(features.at(c));
    d.keys = keys;
    d.y = y;
    d.nloc = nloc;
    d.bugs = bugs;
    d.x.reserve(x.size());
    for (const auto& row : x) {
        std::vector<double> r;
        r.reserve(columns.size());
        for (std::size_t c : columns) r.push_back(row[c]);
        d.x.push_back(std::move(r));
    }
    return d;
}

void Dataset::append_row(RowKey key, std::vector<double> values, int label, double nloc_value, double bug_count) {
    if (values.size() != features.size()) throw InternalError("row width does not match feature count");
    keys.push_back(std::move(key));
    x.push_back(std::move(values));
    y.push_back(label);
    nloc.push_back(nloc_value);
    bugs.push_back(bug_count);
}

void Dataset::require_two_classes(std::string_view what) const {
    const std::size_t p = positives();
    if (p == 0 || p == rows())
        throw InputError(std::string(what) + " needs both classes (faulty " + std::to_string(p) + ", non-faulty " +
                         std::to_string(rows() - p) + ")");
}

FeatureSet feature_set_from_name(std::string_view name) {
    if (name == "conpredictor" || name == "con") return FeatureSet::ConPredictor;
    if (name == "spm" || name == "sequential") return FeatureSet::Spm;
    if (name == "all") return FeatureSet::All;
    throw InputError("unknown feature set '" + std::string(name) + "' (conpredictor, spm, all)");
}

const std::vector<std::string>& conpredictor_features() {
    static const std::vector<std::string> names = concat(
        {"SPC", "SVC", "CSC", "CEC", "CCC", "SVD"},
        mutation_columns({"rmlock", "rmwait", "rmsig", "rmjoinyld", "shfecs", "spltecs"}));
    return names;
}

const std::vector<std::string>& spm_features() {
    static const std::vector<std::string> names =
        concat({"CN", "CM", "CL", "CPA", "CTC", "CP", "CC", "ES", "MN"},
               mutation_columns({"ssdl", "swdd", "oasn", "oeba", "olng", "orrn"}));
    return names;
}

std::vector<std::string> feature_columns(FeatureSet set, const std::vector<std::string>& available) {
    switch (set) {
        case FeatureSet::ConPredictor: return conpredictor_features();
        case FeatureSet::Spm: return spm_features();
        case FeatureSet::All: break;
    }
    std::vector<std::string> out;
    for (const auto& c : available)
        if (!is_key_column(c)) out.push_back(c);
    return out;
}

Dataset select_feature_set(const Dataset& d, FeatureSet set) {
    std::vector<std::size_t> cols;
    for (const auto& name : feature_columns(set, d.features)) cols.push_back(d.require_feature(name));
    return d.subset_features(cols);
}

Dataset assemble(const std::vector<csv::Table>& metric_tables, const csv::Table& labels, FeatureSet set) {
    if (metric_tables.empty()) throw InputError("assemble needs at least one metric table");
    // column name -> (table, column index)
    std::map<std::string, std::pair<std::size_t, std::size_t>> source;
    std::vector<std::string> available;
    std::vector<std::map<RowKey, std::size_t>> index(metric_tables.size());
    int nloc_table = -1;
    std::size_t nloc_col = 0;
    for (std::size_t t = 0; t < metric_tables.size(); ++t) {
        const auto& table = metric_tables[t];
        const std::size_t pc = table.require("program");
        const std::size_t fc = table.require("function");
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            const auto& name = table.header[c];
            if (name == "nloc" && nloc_table < 0) {
                nloc_table = static_cast<int>(t);
                nloc_col = c;
            }
            if (is_key_column(name)) continue;
            if (!source.emplace(name, std::make_pair(t, c)).second)
                throw InputError("metric column '" + name + "' appears in more than one table");
            available.push_back(name);
        }
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            RowKey key{table.rows[r][pc], table.rows[r][fc]};
            if (!index[t].emplace(key, r).second)
                throw InputError("duplicate metric row for " + key.str() + " in table " + std::to_string(t + 1));
        }
    }
    const auto columns = feature_columns(set, available);
    for (const auto& c : columns)
        if (!source.count(c)) throw InputError("no metric table provides column '" + c + "'");

    std::map<RowKey, std::pair<int, double>> label_of;
    {
        const std::size_t pc = labels.require("program");
        const std::size_t fc = labels.require("function");
        const std::size_t lc = labels.require("label");
        const int bc = labels.column("bugs");
        for (const auto& row : labels.rows) {
            RowKey key{row[pc], row[fc]};
            const double v = csv::parse_number(row[lc]);
            if (v != 0.0 && v != 1.0) throw InputError("label for " + key.str() + " must be 0 or 1");
            const double bugs = bc >= 0 ? csv::parse_number(row[static_cast<std::size_t>(bc)]) : v;
            if (bugs < 0 || !std::isfinite(bugs)) throw InputError("bug count for " + key.str() + " must be >= 0");
            if (!index[0].count(key)) throw InputError("label for unknown function " + key.str());
            if (!label_of.emplace(key, std::make_pair(static_cast<int>(v), bugs)).second)
                throw InputError("duplicate label for " + key.str());
        }
    }

    Dataset d;
    d.features = columns;
    const auto& first = metric_tables[0];
    const std::size_t pc = first.require("program");
    const std::size_t fc = first.require("function");
    for (const auto& row : first.rows) {
        RowKey key{row[pc], row[fc]};
        std::vector<double> values;
        values.reserve(columns.size());
        for (const auto& c : columns) {
            const auto [t, col] = source.at(c);
            auto it = index[t].find(key);
            if (it == index[t].end())
                throw InputError("missing metric row for " + key.str() + " in table " + std::to_string(t + 1));
            const double v = csv::parse_number(metric_tables[t].rows[it->second][col]);
            if (!std::isfinite(v)) throw InputError("non-finite " + c + " for " + key.str());
            values.push_back(v);
        }
        double nloc = 0.0;
        if (nloc_table >= 0) {
            auto it = index[static_cast<std::size_t>(nloc_table)].find(key);
            if (it != index[static_cast<std::size_t>(nloc_table)].end())
                nloc = csv::parse_number(metric_tables[static_cast<std::size_t>(nloc_table)].rows[it->second][nloc_col]);
        }
        auto lab = label_of.find(key);
        const int label = lab == label_of.end() ? 0 : lab->second.first;
        const double bugs = lab == label_of.end() ? 0.0 : lab->second.second;
        d.append_row(key, std::move(values), label, nloc, bugs);
    }
    return d;
}

csv::Table to_table(const Dataset& d) {
    csv::Table t;
    t.header = {"program", "function", "nloc", "bugs"};
    t.header.insert(t.header.end(), d.features.begin(), d.features.end());
    t.header.push_back("label");
    for (std::size_t r = 0; r < d.rows(); ++r) {
        std::vector<std::string> row{d.keys[r].program, d.keys[r].function, csv::format_number(d.nloc[r]),
                                     csv::format_number(d.bugs[r])};
        for (double v : d.x[r]) row.push_back(csv::format_number(v));
        row.push_back(std::to_string(d.y[r]));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Dataset from_table(const csv::Table& t) {
    const std::size_t pc = t.require("program");
    const std::size_t fc = t.require("function");
    const std::size_t lc = t.require("label");
    const int nc = t.column("nloc");
    const int bc = t.column("bugs");
    Dataset d;
    std::vector<std::size_t> cols;
    std::set<std::string> seen;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
        if (is_key_column(t.header[c])) continue;
        if (!seen.insert(t.header[c]).second) throw InputError("duplicate feature column '" + t.header[c] + "'");
        d.features.push_back(t.header[c]);
        cols.push_back(c);
    }
    std::set<RowKey> keys;
    for (const auto& row : t.rows) {
        RowKey key{row[pc], row[fc]};
        if (!keys.insert(key).second) throw InputError("duplicate dataset row " + key.str());
        std::vector<double> values;
        for (std::size_t c : cols) {
            const double v = csv::parse_number(row[c]);
            if (!std::isfinite(v)) throw InputError("non-finite value in " + key.str());
            values.push_back(v);
        }
        const double lv = csv::parse_number(row[lc]);
        if (lv != 0.0 && lv != 1.0) throw InputError("label for " + key.str() + " must be 0 or 1");
        const double nloc = nc >= 0 ? csv::parse_number(row[static_cast<std::size_t>(nc)]) : 0.0;
        const double bugs = bc >= 0 ? csv::parse_number(row[static_cast<std::size_t>(bc)]) : lv;
        d.append_row(std::move(key), std::move(values), static_cast<int>(lv), nloc, bugs);
    }
    return d;
}

void write_dataset(const std::string& path, const Dataset& d) { csv::write_file(path, to_table(d)); }

Dataset read_dataset(const std::string& path) {
    try {
        return from_table(csv::read_file(path));
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

}  // namespace conpredict::learn
