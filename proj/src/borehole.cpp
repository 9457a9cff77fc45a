#include "wofe3d/borehole.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace wofe3d {

BoreholeSet::BoreholeSet(std::vector<Collar> collars, std::vector<IntervalLog> categorical,
                         std::vector<IntervalLog> assays)
    : collars_(std::move(collars)), categorical_(std::move(categorical)), assays_(std::move(assays)) {
    for (std::size_t i = 0; i < collars_.size(); ++i) collar_index_[collars_[i].hole_id] = i;
}

const Collar* BoreholeSet::find_collar(const std::string& hole_id) const {
    const auto it = collar_index_.find(hole_id);
    return it == collar_index_.end() ? nullptr : &collars_[it->second];
}

std::vector<IntervalLog> BoreholeSet::logs_for(const std::string& attribute) const {
    std::vector<IntervalLog> out;
    for (const auto& log : categorical_) {
        if (log.attribute == attribute) out.push_back(log);
    }
    for (const auto& log : assays_) {
        if (log.attribute == attribute) out.push_back(log);
    }
    return out;
}

std::vector<std::string> BoreholeSet::categorical_attributes() const {
    std::set<std::string> names;
    for (const auto& log : categorical_) names.insert(log.attribute);
    return {names.begin(), names.end()};
}

std::vector<std::string> BoreholeSet::assay_elements() const {
    std::set<std::string> names;
    for (const auto& log : assays_) names.insert(log.attribute);
    return {names.begin(), names.end()};
}

std::string BoreholeSet::assay_unit(const std::string& element) const {
    for (const auto& log : assays_) {
        if (log.attribute == element) return log.unit;
    }
    return "";
}

namespace {

struct ErrorList {
    std::string source;
    std::vector<std::string> messages;

    void add(std::size_t line, const std::string& what) {
        messages.push_back(source + ":" + std::to_string(line) + ": " + what);
    }
    void raise_if_any() const {
        if (messages.empty()) return;
        std::string joined = std::to_string(messages.size()) + " input problem(s):";
        for (const auto& m : messages) joined += "\n  " + m;
        throw std::runtime_error(joined);
    }
};

void check_overlaps(const std::vector<IntervalLog>& logs, const std::vector<std::size_t>& lines,
                    ErrorList& errors) {
    // group by (hole, attribute), then sort by `from` and compare neighbours
    std::vector<std::size_t> order(logs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& la = logs[a];
        const auto& lb = logs[b];
        if (la.hole_id != lb.hole_id) return la.hole_id < lb.hole_id;
        if (la.attribute != lb.attribute) return la.attribute < lb.attribute;
        return la.from < lb.from;
    });
    for (std::size_t n = 1; n < order.size(); ++n) {
        const auto& prev = logs[order[n - 1]];
        const auto& cur = logs[order[n]];
        if (prev.hole_id == cur.hole_id && prev.attribute == cur.attribute && cur.from < prev.to) {
            errors.add(lines[order[n]], "interval " + cur.hole_id + " [" + fmt_digits(cur.from, 10) +
                                            "," + fmt_digits(cur.to, 10) + ") overlaps previous " +
                                            cur.attribute + " interval");
        }
    }
}

}  // namespace

BoreholeSet parse_boreholes(const CsvTable& collar_table, const CsvTable& interval_table,
                            const CsvTable& assay_table) {
    std::vector<Collar> collars;
    std::map<std::string, double> depth_by_hole;
    {
        ErrorList errors{collar_table.source, {}};
        const int c_id = collar_table.require_column("hole_id");
        const int c_x = collar_table.require_column("x");
        const int c_y = collar_table.require_column("y");
        const int c_z = collar_table.require_column("z");
        const int c_depth = collar_table.require_column("total_depth");
        for (std::size_t r = 0; r < collar_table.rows.size(); ++r) {
            const std::size_t line = collar_table.lines[r];
            Collar c;
            c.hole_id = collar_table.cell(r, c_id);
            if (c.hole_id.empty()) {
                errors.add(line, "empty hole_id");
                continue;
            }
            if (depth_by_hole.count(c.hole_id)) {
                errors.add(line, "duplicate hole_id '" + c.hole_id + "'");
                continue;
            }
            bool ok = parse_number(collar_table.cell(r, c_x), c.x);
            ok = parse_number(collar_table.cell(r, c_y), c.y) && ok;
            ok = parse_number(collar_table.cell(r, c_z), c.z) && ok;
            ok = parse_number(collar_table.cell(r, c_depth), c.total_depth) && ok;
            if (!ok) {
                errors.add(line, "non-numeric collar field for '" + c.hole_id + "'");
                continue;
            }
            if (!(c.total_depth > 0.0)) {
                errors.add(line, "total_depth must be positive for '" + c.hole_id + "'");
                continue;
            }
            depth_by_hole[c.hole_id] = c.total_depth;
            collars.push_back(std::move(c));
        }
        errors.raise_if_any();
    }

    auto parse_interval_common = [&](const CsvTable& t, std::size_t r, int c_id, int c_from,
                                     int c_to, ErrorList& errors, IntervalLog& log) {
        const std::size_t line = t.lines[r];
        log.hole_id = t.cell(r, c_id);
        const auto depth_it = depth_by_hole.find(log.hole_id);
        if (depth_it == depth_by_hole.end()) {
            errors.add(line, "unknown hole_id '" + log.hole_id + "'");
            return false;
        }
        if (!parse_number(t.cell(r, c_from), log.from) || !parse_number(t.cell(r, c_to), log.to)) {
            errors.add(line, "non-numeric from/to for '" + log.hole_id + "'");
            return false;
        }
        if (log.from < 0.0 || log.from >= log.to) {
            errors.add(line, "bad interval for '" + log.hole_id + "': need 0 <= from < to");
            return false;
        }
        if (log.to > depth_it->second + 1e-9) {
            errors.add(line, "interval for '" + log.hole_id + "' extends past total_depth");
            return false;
        }
        return true;
    };

    std::vector<IntervalLog> categorical;
    {
        ErrorList errors{interval_table.source, {}};
        const int c_id = interval_table.require_column("hole_id");
        const int c_from = interval_table.require_column("from");
        const int c_to = interval_table.require_column("to");
        const int c_attr = interval_table.require_column("attribute");
        const int c_code = interval_table.require_column("code");
        std::vector<std::size_t> lines;
        for (std::size_t r = 0; r < interval_table.rows.size(); ++r) {
            IntervalLog log;
            if (!parse_interval_common(interval_table, r, c_id, c_from, c_to, errors, log)) continue;
            log.attribute = interval_table.cell(r, c_attr);
            log.code = interval_table.cell(r, c_code);
            if (log.attribute.empty() || log.code.empty()) {
                errors.add(interval_table.lines[r], "empty attribute or code for '" + log.hole_id + "'");
                continue;
            }
            categorical.push_back(std::move(log));
            lines.push_back(interval_table.lines[r]);
        }
        check_overlaps(categorical, lines, errors);
        errors.raise_if_any();
    }

    std::vector<IntervalLog> assays;
    {
        ErrorList errors{assay_table.source, {}};
        const int c_id = assay_table.require_column("hole_id");
        const int c_from = assay_table.require_column("from");
        const int c_to = assay_table.require_column("to");
        const int c_elem = assay_table.require_column("element");
        const int c_value = assay_table.require_column("value");
        const int c_unit = assay_table.require_column("unit");
        std::map<std::string, std::string> unit_by_element;
        std::vector<std::size_t> lines;
        for (std::size_t r = 0; r < assay_table.rows.size(); ++r) {
            const std::size_t line = assay_table.lines[r];
            IntervalLog log;
            if (!parse_interval_common(assay_table, r, c_id, c_from, c_to, errors, log)) continue;
            log.attribute = assay_table.cell(r, c_elem);
            log.unit = assay_table.cell(r, c_unit);
            if (log.attribute.empty()) {
                errors.add(line, "empty element for '" + log.hole_id + "'");
                continue;
            }
            if (log.unit != "%" && log.unit != "ppm") {
                errors.add(line, "unit must be '%' or 'ppm', found '" + log.unit + "'");
                continue;
            }
            if (!parse_number(assay_table.cell(r, c_value), log.value)) {
                errors.add(line, "non-numeric concentration '" + assay_table.cell(r, c_value) +
                                     "' for '" + log.hole_id + "'");
                continue;
            }
            if (log.value < 0.0) {
                errors.add(line, "negative concentration for '" + log.hole_id + "'");
                continue;
            }
            const auto [it, inserted] = unit_by_element.emplace(log.attribute, log.unit);
            if (!inserted && it->second != log.unit) {
                errors.add(line, "mixed units for element '" + log.attribute + "' ('" + it->second +
                                     "' vs '" + log.unit + "')");
                continue;
            }
            assays.push_back(std::move(log));
            lines.push_back(line);
        }
        check_overlaps(assays, lines, errors);
        errors.raise_if_any();
    }

    return BoreholeSet(std::move(collars), std::move(categorical), std::move(assays));
}

std::vector<PointSample> desurvey(const BoreholeSet& set, std::span<const IntervalLog> logs,
                                  double step) {
    if (!(step > 0.0)) throw std::invalid_argument("desurvey step must be positive");
    std::vector<PointSample> samples;
    for (const auto& log : logs) {
        const Collar* collar = set.find_collar(log.hole_id);
        if (!collar) throw std::runtime_error("desurvey: unknown hole_id '" + log.hole_id + "'");
        const double len = log.to - log.from;
        std::size_t full = static_cast<std::size_t>(std::floor(len / step + 1e-12));
        double tail = len - static_cast<double>(full) * step;
        if (tail < step * 1e-9) tail = 0.0;
        const std::size_t count = full + (tail > 0.0 ? 1 : 0);
        for (std::size_t s = 0; s < count; ++s) {
            double mid;
            if (s < full) {
                mid = log.from + (static_cast<double>(s) + 0.5) * step;
            } else {
                mid = (log.from + static_cast<double>(full) * step + log.to) * 0.5;
            }
            PointSample sample;
            sample.x = collar->x;
            sample.y = collar->y;
            sample.z = collar->z - mid;
            sample.value = log.value;
            sample.code = log.code;
            samples.push_back(std::move(sample));
        }
    }
    return samples;
}

}  // namespace wofe3d
