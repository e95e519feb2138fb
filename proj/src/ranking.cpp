#include "selfs/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "selfs/errors.hpp"

namespace selfs {

namespace {

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::string> lines_of(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string line(text.substr(start, end - start));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) out.push_back(std::move(line));
        start = end + 1;
    }
    return out;
}

double parse_value(const std::string& cell, std::size_t line_no) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != cell.size())
        throw FormatError("score CSV line " + std::to_string(line_no) + ": '" + cell + "' is not a number");
    return v;
}

}  // namespace

void MetricMatrix::validate() const {
    if (models.empty() || metrics.empty()) throw ArgumentError("metric matrix is empty");
    if (values.size() != models.size() * metrics.size()) throw ArgumentError("metric matrix has the wrong size");
    if (std::set<std::string>(models.begin(), models.end()).size() != models.size())
        throw ArgumentError("duplicate model id in metric matrix");
    std::set<std::string> ids;
    for (const auto& s : metrics)
        if (!ids.insert(s.id()).second) throw ArgumentError("duplicate metric '" + s.id() + "' in metric matrix");
    for (std::size_t m = 0; m < models.size(); ++m)
        for (std::size_t k = 0; k < metrics.size(); ++k)
            if (!std::isfinite(at(m, k)))
                throw ArgumentError("non-finite score for model '" + models[m] + "', metric '" + metrics[k].id() +
                                    "'; exclude or impute it before ranking");
}

std::vector<double> rank_column(std::span<const double> values, bool lower_is_better) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        return lower_is_better ? values[l] < values[r] : values[l] > values[r];
    });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        // positions i..j (0-based) share rank mean(i+1..j+1)
        const double avg = 0.5 * static_cast<double>(i + j + 2);
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

RankMatrix rank_models(const MetricMatrix& matrix) {
    matrix.validate();
    const std::size_t M = matrix.models.size(), K = matrix.metrics.size();
    RankMatrix out{M, K, std::vector<double>(M * K)};
    std::vector<double> column(M);
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t m = 0; m < M; ++m) column[m] = matrix.at(m, k);
        // Metric values are scores, so the score's own orientation applies.
        const auto ranks = rank_column(column, negatively_oriented(matrix.metrics[k].score));
        for (std::size_t m = 0; m < M; ++m) out.values[m * K + k] = ranks[m];
    }
    return out;
}

SummaryMatrix summary_scores(const MetricMatrix& matrix, const RankMatrix& ranks, std::span<const std::string> filters) {
    if (ranks.n_models != matrix.models.size() || ranks.n_metrics != matrix.metrics.size())
        throw ArgumentError("rank matrix does not match the metric matrix");
    SummaryMatrix out;
    out.models = matrix.models;
    if (filters.empty()) {
        std::set<std::string> present;
        for (const auto& s : matrix.metrics) present.insert(filter_id(s.filter));
        for (const auto& f : enumerate_filters()) {
            const auto id = filter_id(f);
            if (present.erase(id)) out.filters.push_back(id);
        }
        out.filters.insert(out.filters.end(), present.begin(), present.end());
    } else {
        out.filters.assign(filters.begin(), filters.end());
    }
    std::map<std::string, std::size_t> column;
    for (std::size_t f = 0; f < out.filters.size(); ++f)
        if (!column.emplace(out.filters[f], f).second) throw ArgumentError("duplicate filter '" + out.filters[f] + "'");
    std::vector<std::size_t> filter_of(matrix.metrics.size());
    for (std::size_t k = 0; k < matrix.metrics.size(); ++k) {
        const auto it = column.find(filter_id(matrix.metrics[k].filter));
        if (it == column.end())
            throw ArgumentError("metric '" + matrix.metrics[k].id() + "' maps to none of the listed filters");
        filter_of[k] = it->second;
    }
    const std::size_t M = out.models.size(), F = out.filters.size();
    out.values.assign(M * F, 0.0);
    std::vector<double> per_filter(F, 0.0);
    for (auto f : filter_of) per_filter[f] += 1.0;
    for (std::size_t m = 0; m < M; ++m) {
        for (std::size_t k = 0; k < matrix.metrics.size(); ++k) out.values[m * F + filter_of[k]] += ranks.at(m, k);
        for (std::size_t f = 0; f < F; ++f) {
            if (per_filter[f] == 0.0) throw ArgumentError("filter '" + out.filters[f] + "' has no metrics");
            out.values[m * F + f] /= per_filter[f];
        }
    }
    return out;
}

std::vector<Winner> best_per_filter(const SummaryMatrix& summary) {
    std::vector<Winner> out;
    for (std::size_t f = 0; f < summary.filters.size(); ++f) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < summary.models.size(); ++m) best = std::min(best, summary.at(m, f));
        Winner w;
        w.filter = summary.filters[f];
        w.summary = best;
        for (std::size_t m = 0; m < summary.models.size(); ++m)
            if (summary.at(m, f) == best) w.tied.push_back(summary.models[m]);
        std::sort(w.tied.begin(), w.tied.end());
        if (w.tied.empty()) throw ArgumentError("summary matrix has no models");
        w.model = w.tied.front();
        out.push_back(std::move(w));
    }
    return out;
}

MetricMatrix parse_scores_csv(std::string_view text) {
    const auto lines = lines_of(text);
    if (lines.empty()) throw FormatError("score CSV is empty");
    const auto header = split(lines[0], ',');
    if (header.empty() || header[0] != "model") throw FormatError("score CSV must start with a 'model' column");
    MetricMatrix out;
    if (header.size() >= 3 && header[1] == "metric" && header[2] == "value") {
        std::map<std::string, std::size_t> model_index, metric_index;
        std::map<std::pair<std::size_t, std::size_t>, double> cells;
        std::vector<std::string> metric_ids;
        for (std::size_t i = 1; i < lines.size(); ++i) {
            const auto row = split(lines[i], ',');
            if (row.size() < 3) throw FormatError("score CSV line " + std::to_string(i + 1) + " is short");
            auto [mi, new_model] = model_index.emplace(row[0], out.models.size());
            if (new_model) out.models.push_back(row[0]);
            auto [ki, new_metric] = metric_index.emplace(row[1], metric_ids.size());
            if (new_metric) metric_ids.push_back(row[1]);
            if (!cells.emplace(std::pair{mi->second, ki->second}, parse_value(row[2], i + 1)).second)
                throw FormatError("score CSV repeats model '" + row[0] + "', metric '" + row[1] + "'");
        }
        for (const auto& id : metric_ids) out.metrics.push_back(parse_loss_spec(id));
        out.values.assign(out.models.size() * metric_ids.size(), 0.0);
        for (std::size_t m = 0; m < out.models.size(); ++m) {
            for (std::size_t k = 0; k < metric_ids.size(); ++k) {
                const auto it = cells.find({m, k});
                if (it == cells.end())
                    throw FormatError("score CSV lacks model '" + out.models[m] + "', metric '" + metric_ids[k] + "'");
                out.values[m * metric_ids.size() + k] = it->second;
            }
        }
    } else {
        for (std::size_t k = 1; k < header.size(); ++k) out.metrics.push_back(parse_loss_spec(header[k]));
        for (std::size_t i = 1; i < lines.size(); ++i) {
            const auto row = split(lines[i], ',');
            if (row.size() != header.size())
                throw FormatError("score CSV line " + std::to_string(i + 1) + " has " + std::to_string(row.size()) +
                                  " cells, expected " + std::to_string(header.size()));
            out.models.push_back(row[0]);
            for (std::size_t k = 1; k < row.size(); ++k) out.values.push_back(parse_value(row[k], i + 1));
        }
    }
    return out;
}

std::string ranks_csv(const MetricMatrix& matrix, const RankMatrix& ranks) {
    std::string out = "model,metric,value,rank\n";
    for (std::size_t m = 0; m < matrix.models.size(); ++m)
        for (std::size_t k = 0; k < matrix.metrics.size(); ++k)
            out += matrix.models[m] + ',' + matrix.metrics[k].id() + ',' + format_double(matrix.at(m, k)) + ',' +
                   format_double(ranks.at(m, k)) + '\n';
    return out;
}

std::string summary_csv(const SummaryMatrix& summary) {
    std::string out = "model";
    for (const auto& f : summary.filters) out += ',' + f;
    out += '\n';
    for (std::size_t m = 0; m < summary.models.size(); ++m) {
        out += summary.models[m];
        for (std::size_t f = 0; f < summary.filters.size(); ++f) out += ',' + format_double(summary.at(m, f));
        out += '\n';
    }
    return out;
}

std::string winners_csv(std::span<const Winner> winners) {
    std::string out = "filter,model,summary,tied\n";
    for (const auto& w : winners) {
        std::string tied;
        for (const auto& t : w.tied) tied += (tied.empty() ? "" : ";") + t;
        out += w.filter + ',' + w.model + ',' + format_double(w.summary) + ',' + tied + '\n';
    }
    return out;
}

std::string winners_json(std::span<const Winner> winners) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& w : winners)
        arr.push_back({{"filter", w.filter}, {"model", w.model}, {"summary", w.summary}, {"tied", w.tied}});
    return arr.dump(2) + "\n";
}

}  // namespace selfs
