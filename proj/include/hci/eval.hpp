#pragma once

#include <array>
#include <string>
#include <vector>

#include "hci/moe.hpp"

namespace hci {

/// Per-class recognition counts (NA = samples, NCR = correct) and the 5x5
/// confusion matrix, rows = true class, columns = predicted.
struct EvalTables {
    std::array<int, 5> na{};
    std::array<int, 5> ncr{};
    std::array<std::array<int, 5>, 5> confusion{};
};

EvalTables evaluate(const MoEModel& model, const std::vector<LabeledVector>& dataset);

/// CSV: class,NA,NCR,AR with AR as a percentage ("-" for empty classes).
std::string recognition_table_csv(const EvalTables& t);

/// CSV confusion matrix with G1..G5 headers.
std::string confusion_csv(const EvalTables& t);

}  // namespace hci
