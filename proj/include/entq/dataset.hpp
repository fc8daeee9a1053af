#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "entq/errors.hpp"
#include "entq/features.hpp"
#include "entq/measures.hpp"
#include "entq/parallel.hpp"
#include "entq/rng.hpp"
#include "entq/states.hpp"
#include "entq/text_io.hpp"

namespace entq {

inline constexpr int kNumBins = 10;  // label bins of width 0.1 over (0,1]
inline constexpr std::string_view kDatasetFormat = "entq-dataset-v1";

struct DatasetSpec {
    int qubits = 2;
    long long separable_count = 0;
    long long per_bin_count = 0;          // entangled rows per bin
    double pure_fraction_per_bin = 0.5;   // 2-qubit only
    double ghz_fraction = 0.5;            // 3-qubit only
    std::uint64_t seed = 0;
    long long max_attempts_per_row = 1000000;
};

struct DataRow {
    std::vector<double> features;
    double label = 0.0;
    int bin = 0;  // 0 = separable, 1..10 = label bin
    std::string cls;
};

struct LabeledDataset {
    int qubits = 2;
    std::vector<std::string> feature_names;
    std::vector<DataRow> rows;
    DatasetSpec spec;
    bool has_labels = true;

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_features() const { return feature_names.size(); }

    std::vector<std::vector<double>> feature_matrix() const {
        std::vector<std::vector<double>> x;
        x.reserve(rows.size());
        for (const auto& r : rows) x.push_back(r.features);
        return x;
    }
    std::vector<double> labels() const {
        std::vector<double> y;
        y.reserve(rows.size());
        for (const auto& r : rows) y.push_back(r.label);
        return y;
    }
};

struct FoldAssignment {
    int k = 0;
    std::vector<int> assignment;  // per-row fold index in [0, k)
};

namespace detail {

inline void validate_spec(const DatasetSpec& spec) {
    if (spec.qubits != 2 && spec.qubits != 3) throw DomainError("DatasetSpec: qubits must be 2 or 3");
    if (spec.separable_count < 0 || spec.per_bin_count < 0)
        throw DomainError("DatasetSpec: counts must be >= 0");
    if (!(spec.pure_fraction_per_bin >= 0.0 && spec.pure_fraction_per_bin <= 1.0))
        throw DomainError("DatasetSpec: pure_fraction_per_bin outside [0,1]");
    if (!(spec.ghz_fraction >= 0.0 && spec.ghz_fraction <= 1.0))
        throw DomainError("DatasetSpec: ghz_fraction outside [0,1]");
    if (spec.max_attempts_per_row < 1)
        throw DomainError("DatasetSpec: max_attempts_per_row must be >= 1");
}

// A row's recipe is fixed by its index alone so generation order (and worker
// count) cannot change the output.
struct RowPlan {
    int bin = 0;          // 0 separable, else 1..10
    int variant = 0;      // 2q: 0 pure, 1 mixed; 3q: 0 ghz, 1 w; separable: 0/1 pure/mixed (2q)
};

inline std::vector<RowPlan> plan_rows(const DatasetSpec& spec) {
    std::vector<RowPlan> plan;
    const long long sep = spec.separable_count;
    const long long sep_first = (sep + 1) / 2;  // 2q: pure products; 3q: unused split
    for (long long i = 0; i < sep; ++i) plan.push_back({0, i < sep_first ? 0 : 1});
    const double frac = spec.qubits == 2 ? spec.pure_fraction_per_bin : spec.ghz_fraction;
    for (int b = 1; b <= kNumBins; ++b) {
        const long long first = std::llround(static_cast<double>(spec.per_bin_count) * frac);
        for (long long i = 0; i < spec.per_bin_count; ++i)
            plan.push_back({b, i < first ? 0 : 1});
    }
    return plan;
}

inline DataRow build_2q_row(const RowPlan& plan, const DatasetSpec& spec, std::size_t row_index) {
    RngStream rng(spec.seed, row_index);
    DataRow row;
    row.bin = plan.bin;
    if (plan.bin == 0) {
        const bool pure = plan.variant == 0;
        row.cls = pure ? "sep_pure" : "sep_mixed";
        row.label = 0.0;
        row.features = to_vector(pauli_correlations(sample_separable_2q(pure, rng)));
        return row;
    }
    const double lo = (plan.bin - 1) / 10.0, hi = plan.bin / 10.0;
    if (plan.variant == 0) {
        row.cls = "pure";
        for (int attempt = 0; attempt < 100; ++attempt) {
            const double target = lo + (hi - lo) * rng.uniform_pos();
            const PureState psi = make_pure_2q_with_concurrence(target, rng);
            const double c = concurrence_pure(psi).value;
            if (c > lo && c <= hi) {
                row.label = c;
                row.features = to_vector(pauli_correlations(psi));
                return row;
            }
        }
        throw SamplingError("build_2q_dataset: pure sampler missed bin " + std::to_string(plan.bin));
    }
    row.cls = "mixed";
    const DensityMatrix rho = make_mixed_2q_in_bin(lo, hi, rng);
    row.label = concurrence_mixed(rho).value;
    row.features = to_vector(pauli_correlations(rho));
    return row;
}

inline DataRow build_3q_row(const RowPlan& plan, const DatasetSpec& spec, std::size_t row_index) {
    RngStream rng(spec.seed, row_index);
    DataRow row;
    row.bin = plan.bin;
    if (plan.bin == 0) {
        row.cls = "bisep";
        row.label = 0.0;
        row.features = to_vector(svetlichny_features(sample_biseparable_3q(rng)));
        return row;
    }
    const bool ghz = plan.variant == 0;
    row.cls = ghz ? "ghz" : "w";
    const double lo = (plan.bin - 1) / 10.0, hi = plan.bin / 10.0;
    for (long long attempt = 0; attempt < spec.max_attempts_per_row; ++attempt) {
        const PureState psi = ghz ? sample_ghz_class(rng) : sample_w_class(rng);
        const double g = gme_concurrence_pure(psi).value;
        if (g > lo && g <= hi) {
            row.label = g;
            row.features = to_vector(svetlichny_features(psi));
            return row;
        }
    }
    throw SamplingError("build_3q_dataset: bin " + std::to_string(plan.bin) + " starved for class " +
                        row.cls + " after " + std::to_string(spec.max_attempts_per_row) +
                        " attempts");
}

template <typename BuildRow>
LabeledDataset build_dataset(const DatasetSpec& spec, int workers, BuildRow&& build_row) {
    validate_spec(spec);
    const std::vector<RowPlan> plan = plan_rows(spec);
    LabeledDataset ds;
    ds.qubits = spec.qubits;
    ds.spec = spec;
    ds.feature_names = spec.qubits == 2 ? feature_names_2q() : feature_names_3q();
    ds.rows.resize(plan.size());
    parallel_for(plan.size(), workers,
                 [&](std::size_t i) { ds.rows[i] = build_row(plan[i], spec, i); });
    return ds;
}

}  // namespace detail

inline LabeledDataset build_2q_dataset(const DatasetSpec& spec, int workers = 1) {
    if (spec.qubits != 2) throw DomainError("build_2q_dataset: spec.qubits must be 2");
    return detail::build_dataset(spec, workers, detail::build_2q_row);
}

inline LabeledDataset build_3q_dataset(const DatasetSpec& spec, int workers = 1) {
    if (spec.qubits != 3) throw DomainError("build_3q_dataset: spec.qubits must be 3");
    return detail::build_dataset(spec, workers, detail::build_3q_row);
}

inline LabeledDataset build_dataset(const DatasetSpec& spec, int workers = 1) {
    return spec.qubits == 2 ? build_2q_dataset(spec, workers) : build_3q_dataset(spec, workers);
}

inline void write_csv(const LabeledDataset& ds, std::ostream& out) {
    out << "# format=" << kDatasetFormat << "\n";
    out << "# qubits=" << ds.qubits << "\n";
    out << "# separable_count=" << ds.spec.separable_count << "\n";
    out << "# per_bin_count=" << ds.spec.per_bin_count << "\n";
    if (ds.qubits == 2)
        out << "# pure_fraction_per_bin=" << format_double(ds.spec.pure_fraction_per_bin) << "\n";
    else
        out << "# ghz_fraction=" << format_double(ds.spec.ghz_fraction) << "\n";
    out << "# seed=" << ds.spec.seed << "\n";
    for (std::size_t i = 0; i < ds.feature_names.size(); ++i)
        out << (i ? "," : "") << ds.feature_names[i];
    if (ds.has_labels) out << ",label,bin,class";
    out << "\n";
    for (const auto& row : ds.rows) {
        if (row.features.size() != ds.feature_names.size())
            throw DomainError("write_csv: row feature width mismatch");
        for (std::size_t i = 0; i < row.features.size(); ++i)
            out << (i ? "," : "") << format_double(row.features[i]);
        if (ds.has_labels)
            out << "," << format_double(row.label) << "," << row.bin << "," << row.cls;
        out << "\n";
    }
    if (!out) throw ParseError("write_csv: stream write failed");
}

inline void write_csv(const LabeledDataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // fixed newline convention on every platform
    if (!out) throw ParseError("write_csv: cannot open '" + path + "'");
    write_csv(ds, out);
}

inline LabeledDataset read_csv(std::istream& in) {
    LabeledDataset ds;
    ds.feature_names.clear();
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& msg) {
        throw ParseError("read_csv: line " + std::to_string(line_no) + ": " + msg);
    };

    bool seen_format = false, seen_qubits = false, seen_columns = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        if (sv.front() == '#') {
            sv = trim(sv.substr(1));
            const auto eq = sv.find('=');
            if (eq == std::string_view::npos) continue;  // free-form comment
            const std::string_view key = trim(sv.substr(0, eq));
            const std::string_view val = trim(sv.substr(eq + 1));
            try {
                if (key == "format") {
                    if (val != kDatasetFormat)
                        throw ParseError("unsupported format '" + std::string(val) +
                                         "', expected '" + std::string(kDatasetFormat) + "'");
                    seen_format = true;
                } else if (key == "qubits") {
                    ds.qubits = static_cast<int>(parse_int(val, "qubits"));
                    if (ds.qubits != 2 && ds.qubits != 3)
                        throw ParseError("qubits must be 2 or 3");
                    ds.spec.qubits = ds.qubits;
                    seen_qubits = true;
                } else if (key == "separable_count") {
                    ds.spec.separable_count = parse_int(val, "separable_count");
                } else if (key == "per_bin_count") {
                    ds.spec.per_bin_count = parse_int(val, "per_bin_count");
                } else if (key == "pure_fraction_per_bin") {
                    ds.spec.pure_fraction_per_bin = parse_double(val, "pure_fraction_per_bin");
                } else if (key == "ghz_fraction") {
                    ds.spec.ghz_fraction = parse_double(val, "ghz_fraction");
                } else if (key == "seed") {
                    ds.spec.seed = static_cast<std::uint64_t>(parse_int(val, "seed"));
                }
            } catch (const ParseError& e) {
                fail(e.what());
            }
            continue;
        }
        // First non-comment line: column names.
        if (!seen_format) fail("missing '# format=' header before data");
        if (!seen_qubits) fail("missing '# qubits=' header before data");
        auto cols = split(sv, ',');
        ds.has_labels = cols.size() >= 3 && trim(cols[cols.size() - 3]) == "label" &&
                        trim(cols[cols.size() - 2]) == "bin" && trim(cols.back()) == "class";
        const std::size_t n_feat = ds.has_labels ? cols.size() - 3 : cols.size();
        const std::size_t expect = ds.qubits == 2 ? 9u : 8u;
        if (n_feat != expect)
            fail("qubits=" + std::to_string(ds.qubits) + " requires " + std::to_string(expect) +
                 " feature columns, found " + std::to_string(n_feat));
        for (std::size_t i = 0; i < n_feat; ++i) ds.feature_names.emplace_back(trim(cols[i]));
        seen_columns = true;
        break;
    }
    if (!seen_columns) fail("missing column-name row");

    const std::size_t width = ds.feature_names.size() + (ds.has_labels ? 3 : 0);
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view sv = trim(line);
        if (sv.empty()) continue;
        if (sv.front() == '#') continue;
        const auto cols = split(sv, ',');
        if (cols.size() != width)
            fail("expected " + std::to_string(width) + " columns, found " +
                 std::to_string(cols.size()));
        DataRow row;
        row.features.reserve(ds.feature_names.size());
        try {
            for (std::size_t i = 0; i < ds.feature_names.size(); ++i) {
                const double v = parse_double(trim(cols[i]), "feature " + ds.feature_names[i]);
                if (!std::isfinite(v)) throw ParseError("non-finite feature value");
                row.features.push_back(v);
            }
            if (ds.has_labels) {
                row.label = parse_double(trim(cols[width - 3]), "label");
                if (!std::isfinite(row.label)) throw ParseError("non-finite label");
                row.bin = static_cast<int>(parse_int(trim(cols[width - 2]), "bin"));
                if (row.bin < 0 || row.bin > kNumBins) throw ParseError("bin outside [0,10]");
                row.cls = std::string(trim(cols[width - 1]));
            }
        } catch (const ParseError& e) {
            fail(e.what());
        }
        ds.rows.push_back(std::move(row));
    }
    return ds;
}

inline LabeledDataset read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("read_csv: cannot open '" + path + "'");
    return read_csv(in);
}

// Stratified k-fold: shuffle within each bin, then deal rows round-robin with
// a counter that runs across bins, so fold sizes differ by at most one both
// per bin and overall.
inline FoldAssignment kfold(const LabeledDataset& ds, int k, std::uint64_t seed) {
    if (k < 2) throw DomainError("kfold: k must be >= 2");
    if (ds.rows.size() < static_cast<std::size_t>(k))
        throw DomainError("kfold: k exceeds row count");
    std::vector<std::vector<std::size_t>> by_bin(kNumBins + 1);
    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
        const int b = ds.rows[i].bin;
        if (b < 0 || b > kNumBins) throw DomainError("kfold: row bin outside [0,10]");
        by_bin[static_cast<std::size_t>(b)].push_back(i);
    }
    RngStream rng(seed, 0);
    FoldAssignment fa;
    fa.k = k;
    fa.assignment.assign(ds.rows.size(), 0);
    std::size_t counter = 0;
    for (auto& idx : by_bin) {
        for (std::size_t i = idx.size(); i > 1; --i)
            std::swap(idx[i - 1], idx[rng.uniform_int(i)]);
        for (const std::size_t row : idx)
            fa.assignment[row] = static_cast<int>(counter++ % static_cast<std::size_t>(k));
    }
    return fa;
}

}  // namespace entq
