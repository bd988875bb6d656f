#include "hci/eval.hpp"

#include <sstream>
#include <stdexcept>

namespace hci {

EvalTables evaluate(const MoEModel& model, const std::vector<LabeledVector>& dataset) {
    if (model.class_count != 5) throw std::invalid_argument("evaluate: expected a 5-class model");
    EvalTables t;
    for (const LabeledVector& s : dataset) {
        if (s.label < 1 || s.label > 5) throw std::invalid_argument("evaluate: label out of range");
        const int predicted = classify(model, s.x).label;
        ++t.na[static_cast<std::size_t>(s.label - 1)];
        ++t.confusion[static_cast<std::size_t>(s.label - 1)][static_cast<std::size_t>(predicted - 1)];
        if (predicted == s.label) ++t.ncr[static_cast<std::size_t>(s.label - 1)];
    }
    return t;
}

std::string recognition_table_csv(const EvalTables& t) {
    std::ostringstream out;
    out << "class,NA,NCR,AR\n";
    for (int c = 0; c < 5; ++c) {
        out << "G" << (c + 1) << "," << t.na[static_cast<std::size_t>(c)] << ","
            << t.ncr[static_cast<std::size_t>(c)] << ",";
        if (t.na[static_cast<std::size_t>(c)] == 0) {
            out << "-";
        } else {
            const double ar = 100.0 * t.ncr[static_cast<std::size_t>(c)] / t.na[static_cast<std::size_t>(c)];
            out << ar << "%";
        }
        out << "\n";
    }
    return out.str();
}

std::string confusion_csv(const EvalTables& t) {
    std::ostringstream out;
    out << "true\\pred,G1,G2,G3,G4,G5\n";
    for (int r = 0; r < 5; ++r) {
        out << "G" << (r + 1);
        for (int c = 0; c < 5; ++c) out << "," << t.confusion[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        out << "\n";
    }
    return out.str();
}

}  // namespace hci
