#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "entq/dataset.hpp"

using namespace entq;
using Catch::Matchers::ContainsSubstring;

namespace {

DatasetSpec small_2q() {
    DatasetSpec spec;
    spec.qubits = 2;
    spec.separable_count = 10;
    spec.per_bin_count = 9;
    spec.pure_fraction_per_bin = 0.5;
    spec.seed = 42;
    return spec;
}

DatasetSpec small_3q() {
    DatasetSpec spec;
    spec.qubits = 3;
    spec.separable_count = 4;
    spec.per_bin_count = 2;
    spec.ghz_fraction = 0.5;
    spec.seed = 7;
    return spec;
}

bool rows_equal(const LabeledDataset& a, const LabeledDataset& b) {
    if (a.rows.size() != b.rows.size()) return false;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        const DataRow &ra = a.rows[i], &rb = b.rows[i];
        if (ra.features != rb.features || ra.label != rb.label || ra.bin != rb.bin ||
            ra.cls != rb.cls)
            return false;
    }
    return true;
}

}  // namespace

TEST_CASE("2q dataset has the planned composition", "[dataset]") {
    const LabeledDataset ds = build_2q_dataset(small_2q());
    REQUIRE(ds.n_rows() == 100);
    REQUIRE(ds.n_features() == 9);
    CHECK(ds.feature_names == feature_names_2q());

    std::map<std::pair<int, std::string>, int> counts;
    for (const auto& row : ds.rows) ++counts[{row.bin, row.cls}];
    CHECK(counts[{0, "sep_pure"}] == 5);
    CHECK(counts[{0, "sep_mixed"}] == 5);
    for (int b = 1; b <= 10; ++b) {
        CHECK(counts[{b, "pure"}] == 5);  // llround(9 * 0.5) = 5
        CHECK(counts[{b, "mixed"}] == 4);
    }

    for (const auto& row : ds.rows) {
        REQUIRE(row.features.size() == 9);
        for (const double f : row.features) {
            CHECK(std::isfinite(f));
            CHECK(std::abs(f) <= 1.0 + 1e-9);
        }
        if (row.bin == 0) {
            CHECK(row.label == 0.0);
        } else {
            CHECK(row.label > (row.bin - 1) / 10.0);
            CHECK(row.label <= row.bin / 10.0);
        }
    }
}

TEST_CASE("3q dataset has the planned composition", "[dataset]") {
    const LabeledDataset ds = build_3q_dataset(small_3q());
    REQUIRE(ds.n_rows() == 24);
    REQUIRE(ds.n_features() == 8);
    CHECK(ds.feature_names == feature_names_3q());

    std::map<std::pair<int, std::string>, int> counts;
    for (const auto& row : ds.rows) ++counts[{row.bin, row.cls}];
    CHECK(counts[{0, "bisep"}] == 4);
    for (int b = 1; b <= 10; ++b) {
        CHECK(counts[{b, "ghz"}] == 1);
        CHECK(counts[{b, "w"}] == 1);
    }
    for (const auto& row : ds.rows) {
        if (row.bin == 0) {
            CHECK(row.label == 0.0);
        } else {
            CHECK(row.label > (row.bin - 1) / 10.0);
            CHECK(row.label <= row.bin / 10.0);
        }
    }
}

TEST_CASE("generation is deterministic and worker-count independent", "[dataset]") {
    const LabeledDataset base = build_2q_dataset(small_2q(), 1);
    CHECK(rows_equal(base, build_2q_dataset(small_2q(), 1)));
    CHECK(rows_equal(base, build_2q_dataset(small_2q(), 4)));

    DatasetSpec other = small_2q();
    other.seed = 43;
    CHECK_FALSE(rows_equal(base, build_2q_dataset(other)));

    const LabeledDataset b3 = build_3q_dataset(small_3q(), 1);
    CHECK(rows_equal(b3, build_3q_dataset(small_3q(), 3)));
}

TEST_CASE("csv round trip preserves every value exactly", "[dataset]") {
    for (const LabeledDataset& ds : {build_2q_dataset(small_2q()), build_3q_dataset(small_3q())}) {
        std::stringstream buf;
        write_csv(ds, buf);
        const LabeledDataset back = read_csv(buf);
        CHECK(back.qubits == ds.qubits);
        CHECK(back.has_labels);
        CHECK(back.feature_names == ds.feature_names);
        CHECK(back.spec.separable_count == ds.spec.separable_count);
        CHECK(back.spec.per_bin_count == ds.spec.per_bin_count);
        CHECK(back.spec.seed == ds.spec.seed);
        CHECK(rows_equal(back, ds));
    }
}

TEST_CASE("csv writes are byte-stable", "[dataset]") {
    std::stringstream a, b;
    write_csv(build_2q_dataset(small_2q(), 1), a);
    write_csv(build_2q_dataset(small_2q(), 4), b);
    CHECK(a.str() == b.str());
}

TEST_CASE("unlabeled csv reads back without labels", "[dataset]") {
    LabeledDataset ds = build_2q_dataset(small_2q());
    ds.has_labels = false;
    std::stringstream buf;
    write_csv(ds, buf);
    CHECK(buf.str().find("label") == std::string::npos);
    const LabeledDataset back = read_csv(buf);
    CHECK_FALSE(back.has_labels);
    REQUIRE(back.n_rows() == ds.n_rows());
    for (std::size_t i = 0; i < back.n_rows(); ++i)
        CHECK(back.rows[i].features == ds.rows[i].features);
}

TEST_CASE("csv reader rejects malformed input with line numbers", "[dataset]") {
    const std::string header =
        "# format=entq-dataset-v1\n# qubits=2\nT11,T12,T13,T21,T22,T23,T31,T32,T33,label,bin,class\n";
    const std::string good_row = "0,0,0,0,0,0,0,0,1,0,0,sep_pure\n";

    auto read_str = [](const std::string& text) {
        std::stringstream in(text);
        return read_csv(in);
    };

    CHECK_THROWS_MATCHES(read_str("T11,T12\n"), ParseError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("format")));
    CHECK_THROWS_MATCHES(read_str("# format=other-v9\n"), ParseError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("unsupported format")));
    CHECK_THROWS_MATCHES(read_str("# format=entq-dataset-v1\n# qubits=2\n"), ParseError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("column-name row")));
    CHECK_THROWS_MATCHES(read_str(header + "0,0,0\n"), ParseError,
                         Catch::Matchers::MessageMatches(
                             ContainsSubstring("line 4") && ContainsSubstring("12 columns")));
    CHECK_THROWS_MATCHES(read_str(header + good_row + "0,0,zap,0,0,0,0,0,1,0,0,x\n"), ParseError,
                         Catch::Matchers::MessageMatches(
                             ContainsSubstring("line 5") && ContainsSubstring("bad number")));
    CHECK_THROWS_MATCHES(read_str(header + "0,0,0,0,0,0,0,0,1,0,11,x\n"), ParseError,
                         Catch::Matchers::MessageMatches(ContainsSubstring("bin outside")));

    // A 3-qubit file must carry exactly eight feature columns.
    const std::string bad3q =
        "# format=entq-dataset-v1\n# qubits=3\nT11,T12,T13,T21,T22,T23,T31,T32,T33,label,bin,class\n";
    CHECK_THROWS_MATCHES(read_str(bad3q), ParseError,
                         Catch::Matchers::MessageMatches(
                             ContainsSubstring("requires 8 feature columns")));
}

TEST_CASE("spec validation rejects bad requests", "[dataset]") {
    DatasetSpec spec = small_2q();
    spec.qubits = 4;
    CHECK_THROWS_AS(build_dataset(spec), DomainError);

    spec = small_2q();
    spec.separable_count = -1;
    CHECK_THROWS_AS(build_2q_dataset(spec), DomainError);

    spec = small_2q();
    spec.pure_fraction_per_bin = 1.5;
    CHECK_THROWS_AS(build_2q_dataset(spec), DomainError);

    spec = small_3q();
    spec.max_attempts_per_row = 0;
    CHECK_THROWS_AS(build_3q_dataset(spec), DomainError);

    CHECK_THROWS_AS(build_2q_dataset(small_3q()), DomainError);
    CHECK_THROWS_AS(build_3q_dataset(small_2q()), DomainError);
}

TEST_CASE("kfold balances folds per bin and overall", "[dataset]") {
    const LabeledDataset ds = build_2q_dataset(small_2q());
    const FoldAssignment fa = kfold(ds, 5, 11);
    REQUIRE(fa.k == 5);
    REQUIRE(fa.assignment.size() == ds.n_rows());

    std::vector<int> global(5, 0);
    std::map<int, std::vector<int>> per_bin;
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        const int f = fa.assignment[i];
        REQUIRE(f >= 0);
        REQUIRE(f < 5);
        ++global[static_cast<std::size_t>(f)];
        auto& counts = per_bin[ds.rows[i].bin];
        counts.resize(5, 0);
        ++counts[static_cast<std::size_t>(f)];
    }
    for (const int g : global) CHECK(g == 20);
    for (const auto& [bin, counts] : per_bin) {
        const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
        INFO("bin " << bin);
        CHECK(*hi - *lo <= 1);
    }
}

TEST_CASE("kfold is deterministic in the seed and validates k", "[dataset]") {
    const LabeledDataset ds = build_2q_dataset(small_2q());
    CHECK(kfold(ds, 5, 3).assignment == kfold(ds, 5, 3).assignment);
    CHECK(kfold(ds, 5, 3).assignment != kfold(ds, 5, 4).assignment);
    CHECK_THROWS_AS(kfold(ds, 1, 3), DomainError);
    CHECK_THROWS_AS(kfold(ds, 101, 3), DomainError);
}
