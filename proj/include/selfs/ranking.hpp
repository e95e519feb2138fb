#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "selfs/loss.hpp"

namespace selfs {

/// Models x metrics, row-major.
struct MetricMatrix {
    std::vector<std::string> models;
    std::vector<LossSpec> metrics;
    std::vector<double> values;

    double at(std::size_t m, std::size_t k) const { return values[m * metrics.size() + k]; }
    void validate() const;  ///< shape, uniqueness, finiteness (names the offenders)
};

/// Same layout as the metric matrix; 1 is best, ties share their average position.
struct RankMatrix {
    std::size_t n_models = 0;
    std::size_t n_metrics = 0;
    std::vector<double> values;

    double at(std::size_t m, std::size_t k) const { return values[m * n_metrics + k]; }
};

RankMatrix rank_models(const MetricMatrix& matrix);

/// Average ranks of a single column, respecting orientation.
std::vector<double> rank_column(std::span<const double> values, bool lower_is_better);

struct SummaryMatrix {
    std::vector<std::string> models;
    std::vector<std::string> filters;  ///< filter ids
    std::vector<double> values;        ///< models x filters, mean rank

    double at(std::size_t m, std::size_t f) const { return values[m * filters.size() + f]; }
};

/**
 * Mean rank of each model over the metrics of each filter. With `filters`
 * empty, every filter present is used in canonical order; otherwise each
 * metric must map to one of the listed filters.
 */
SummaryMatrix summary_scores(const MetricMatrix& matrix, const RankMatrix& ranks,
                             std::span<const std::string> filters = {});

struct Winner {
    std::string filter;
    std::string model;
    double summary = 0.0;
    std::vector<std::string> tied;  ///< every model sharing the best score, winner included
};

/// Lowest summary score per filter; ties go to the lexicographically smallest model id.
std::vector<Winner> best_per_filter(const SummaryMatrix& summary);

/// Long ("model,metric,value,fallbacks") or wide ("model,<metric ids>...") score CSV.
MetricMatrix parse_scores_csv(std::string_view text);

std::string ranks_csv(const MetricMatrix& matrix, const RankMatrix& ranks);
std::string summary_csv(const SummaryMatrix& summary);
std::string winners_csv(std::span<const Winner> winners);
std::string winners_json(std::span<const Winner> winners);

}  // namespace selfs
