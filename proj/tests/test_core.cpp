#include <array>
#include <random>

#include <gtest/gtest.h>

#include "cfx/eu.hpp"

using namespace cfx;

namespace {

// Screening example, row-major: GT=T row then GT=F row; columns are
// (aided, unaided) = (T,T), (T,F), (F,T), (F,F).
constexpr std::array<std::array<double, 4>, 2> kTable = {{{0.135, 0.025, 0.01, 0.03}, {0.09, 0.07, 0.09, 0.55}}};

CounterfactualMatrix worked_matrix() { return CounterfactualMatrix::from_table(kTable[0], kTable[1]); }

// Independent oracle working on the raw table layout: U[gt][decision] with
// T=0/F=1, and the four off-diagonal columns (1 and 2) carrying d*CU.
struct TableOracle {
    std::array<std::array<double, 4>, 2> p;
    std::array<std::array<double, 2>, 2> U;
    std::array<std::array<double, 2>, 2> d;   // [gt][col-1]
    std::array<std::array<double, 2>, 2> cu;  // [gt][col-1]

    static int aided(int col) { return col < 2 ? 0 : 1; }
    static int unaided(int col) { return col % 2 == 0 ? 0 : 1; }

    double outcome() const {
        double s = 0;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 4; ++c) s += p[r][c] * U[r][aided(c)];
        return s;
    }
    double unaided_eu() const {
        double s = 0;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 4; ++c) s += p[r][c] * U[r][unaided(c)];
        return s;
    }
    double counter() const {
        double s = 0;
        for (int r = 0; r < 2; ++r)
            for (int c = 1; c <= 2; ++c) s += p[r][c] * d[r][c - 1] * cu[r][c - 1];
        return s;
    }
};

TableOracle worked_oracle() {
    // CTP and CFN sit in row T columns 1, 2; CFP and CTN in row F columns 1, 2.
    return TableOracle{kTable, {{{2, -10}, {-1, 1}}}, {{{0.01, 0.8}, {0.1, 0.01}}}, {{{5, -30}, {-2, 5}}}};
}

CounterfactualMatrix random_matrix(std::mt19937_64& g, double zero_prob = 0.0) {
    std::exponential_distribution<double> e(1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::array<double, 8> w{};
    double total = 0;
    for (auto& x : w) {
        x = u(g) < zero_prob ? 0.0 : e(g);
        total += x;
    }
    if (total == 0) w[0] = total = 1;
    CounterfactualMatrix m;
    for (std::size_t i = 0; i < 8; ++i) m[kAllCells[i]] = w[i] / total;
    return m;
}

UtilityModel random_utilities(std::mt19937_64& g) {
    std::uniform_real_distribution<double> v(-20.0, 20.0), pr(0.0, 1.0);
    UtilityModel u;
    u.outcome_u = OutcomeUtilities(v(g), v(g), v(g), v(g));
    u.cu_automated = CfValues(v(g), v(g), v(g), v(g));
    u.cu_reviewed = CfValues(v(g), v(g), v(g), v(g));
    u.discovery_d = CfValues(pr(g), pr(g), pr(g), pr(g));
    return u;
}

constexpr int kPropertyTrials = 2000;

} // namespace

// --- cells -----------------------------------------------------------------

TEST(Cells, ClassifyNamedExamples) {
    EXPECT_EQ(classify_cell(GroundTruth::T, Decision::F, Decision::T), CellKind::CFN);
    EXPECT_EQ(classify_cell(GroundTruth::F, Decision::F, Decision::F), CellKind::NTN);
    EXPECT_EQ(classify_cell(GroundTruth::T, Decision::T, Decision::F), CellKind::CTP);
}

TEST(Cells, ClassificationIsBijectiveAndCounterfactualIffDisagreement) {
    std::array<int, kCellCount> seen{};
    for (GroundTruth g : {GroundTruth::T, GroundTruth::F})
        for (Decision a : {Decision::T, Decision::F})
            for (Decision u : {Decision::T, Decision::F}) {
                const CellKind c = classify_cell(g, a, u);
                ++seen[index(c)];
                EXPECT_EQ(is_counterfactual(c), a != u);
                EXPECT_EQ(ground_truth_of(c), g);
                EXPECT_EQ(aided_of(c), a);
                EXPECT_EQ(unaided_of(c), u);
            }
    for (int n : seen) EXPECT_EQ(n, 1);
}

TEST(Cells, NamesRoundTrip) {
    for (CellKind c : kAllCells) EXPECT_EQ(parse_cell(name(c)), c);
    for (CfCell c : kAllCfCells) EXPECT_EQ(parse_cf_cell(name(c)), c);
    EXPECT_FALSE(parse_cell("XYZ"));
    EXPECT_FALSE(parse_cf_cell("NTP"));
}

// --- matrix validation and partition ----------------------------------------

TEST(Matrix, WorkedTableIsValid) { EXPECT_TRUE(validate_matrix(worked_matrix()).ok()); }

TEST(Matrix, UniformIsValid) {
    CounterfactualMatrix m;
    for (CellKind c : kAllCells) m[c] = 0.125;
    EXPECT_TRUE(validate_matrix(m).ok());
}

TEST(Matrix, NegativeEntryReported) {
    auto m = worked_matrix();
    m[CellKind::NTP] = -0.1;
    m[CellKind::NTN] += 0.235;
    const auto check = validate_matrix(m);
    ASSERT_FALSE(check.ok());
    EXPECT_EQ(check.issues.front().code, ErrorCode::NegativeEntry);
    EXPECT_EQ(check.issues.front().cell, CellKind::NTP);
    try {
        require_valid(m);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NegativeEntry);
        EXPECT_EQ(e.field_path(), "matrix.NTP");
    }
}

TEST(Matrix, NonStochasticReported) {
    auto m = worked_matrix();
    m[CellKind::NTN] += 1e-6;
    const auto check = validate_matrix(m);
    ASSERT_FALSE(check.ok());
    EXPECT_EQ(check.issues.front().code, ErrorCode::NonStochastic);
    EXPECT_THROW(outcome_eu(m, screening_utilities()), Error);
}

TEST(Matrix, SumToleranceIsOneInABillion) {
    auto m = worked_matrix();
    m[CellKind::NTN] += 5e-10;
    EXPECT_TRUE(validate_matrix(m).ok());
    m[CellKind::NTN] += 1e-9;
    EXPECT_FALSE(validate_matrix(m).ok());
}

TEST(Partition, WorkedTableGivesBothConfusionMatrices) {
    const auto p = partition(worked_matrix());
    EXPECT_NEAR(p.aided.at(GroundTruth::T, Decision::T), 0.16, 1e-12);
    EXPECT_NEAR(p.aided.at(GroundTruth::T, Decision::F), 0.04, 1e-12);
    EXPECT_NEAR(p.aided.at(GroundTruth::F, Decision::T), 0.16, 1e-12);
    EXPECT_NEAR(p.aided.at(GroundTruth::F, Decision::F), 0.64, 1e-12);
    EXPECT_NEAR(p.unaided.at(GroundTruth::T, Decision::T), 0.145, 1e-12);
    EXPECT_NEAR(p.unaided.at(GroundTruth::T, Decision::F), 0.055, 1e-12);
    EXPECT_NEAR(p.unaided.at(GroundTruth::F, Decision::T), 0.18, 1e-12);
    EXPECT_NEAR(p.unaided.at(GroundTruth::F, Decision::F), 0.62, 1e-12);
}

TEST(Partition, SensitivitySpecificityOfWorkedTable) {
    const auto p = partition(worked_matrix());
    EXPECT_NEAR(sensitivity(p.aided), 0.8, 1e-12);
    EXPECT_NEAR(specificity(p.aided), 0.8, 1e-12);
    EXPECT_NEAR(sensitivity(p.unaided), 0.725, 1e-12);
    EXPECT_NEAR(specificity(p.unaided), 0.775, 1e-12);
}

TEST(Partition, PerfectDiagonal) {
    ConfusionMatrix cm;
    cm.at(GroundTruth::T, Decision::T) = 0.3;
    cm.at(GroundTruth::F, Decision::F) = 0.7;
    EXPECT_EQ(sensitivity(cm), 1.0);
    EXPECT_EQ(specificity(cm), 1.0);
}

TEST(Partition, DegenerateMarginalThrowsAndReportLeavesItEmpty) {
    CounterfactualMatrix m;
    m[CellKind::NTN] = 1.0;
    const auto p = partition(m);
    try {
        sensitivity(p.aided);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateMarginal);
    }
    EXPECT_EQ(specificity(p.aided), 1.0);
    const auto r = build_report(m, screening_utilities(), CuMode::Reviewed);
    EXPECT_FALSE(r.aided_sensitivity);
    EXPECT_EQ(r.aided_specificity, 1.0);
}

TEST(Partition, NoCounterfactualMassMeansAidedEqualsUnaided) {
    std::mt19937_64 g(11);
    for (int t = 0; t < 200; ++t) {
        auto m = random_matrix(g);
        double moved = 0;
        for (CfCell c : kAllCfCells) {
            moved += m[cell_of(c)];
            m[cell_of(c)] = 0;
        }
        m[CellKind::NTN] += moved;
        const auto p = partition(m);
        for (GroundTruth gt : {GroundTruth::T, GroundTruth::F})
            for (Decision d : {Decision::T, Decision::F}) EXPECT_EQ(p.aided.at(gt, d), p.unaided.at(gt, d));
    }
}

TEST(PartitionProperty, BothSidesSumToOneAndKeepGroundTruthMarginals) {
    std::mt19937_64 g(1);
    for (int t = 0; t < kPropertyTrials; ++t) {
        const auto m = random_matrix(g, 0.2);
        const auto p = partition(m);
        EXPECT_NEAR(p.aided.total(), 1.0, 1e-12);
        EXPECT_NEAR(p.unaided.total(), 1.0, 1e-12);
        for (GroundTruth gt : {GroundTruth::T, GroundTruth::F}) {
            double row = 0;
            for (CellKind c : kAllCells)
                if (ground_truth_of(c) == gt) row += m[c];
            EXPECT_NEAR(p.aided.row_mass(gt), row, 1e-12);
            EXPECT_NEAR(p.unaided.row_mass(gt), row, 1e-12);
        }
    }
}

// --- expected utilities --------------------------------------------------

TEST(ExpectedUtility, WorkedExampleValues) {
    const auto m = worked_matrix();
    const auto u = screening_utilities();
    EXPECT_NEAR(outcome_eu(m, u), 0.400, 1e-12);
    EXPECT_NEAR(counter_eu(m, u, CuMode::Reviewed), -0.24825, 1e-12);
    EXPECT_NEAR(counter_eu(m, u, CuMode::Automated), -0.24825, 1e-12);
    EXPECT_NEAR(usage_eu(m, u, CuMode::Reviewed), 0.15175, 1e-12);
    EXPECT_NEAR(unaided_eu(m, u), 0.18, 1e-12);
}

TEST(ExpectedUtility, WorkedExampleMatchesTableOracle) {
    const auto o = worked_oracle();
    const auto r = build_report(worked_matrix(), screening_utilities(), CuMode::Reviewed);
    EXPECT_NEAR(r.outcome_eu, o.outcome(), 1e-12);
    EXPECT_NEAR(r.unaided_eu, o.unaided_eu(), 1e-12);
    EXPECT_NEAR(r.counter_eu, o.counter(), 1e-12);
    EXPECT_NEAR(r.relative_outcome_eu, o.outcome() - o.unaided_eu(), 1e-12);
    EXPECT_NEAR(r.relative_usage_eu, o.outcome() + o.counter() - o.unaided_eu(), 1e-12);
}

TEST(ExpectedUtility, TrivialCases) {
    const auto m = worked_matrix();
    UtilityModel zero;
    EXPECT_EQ(outcome_eu(m, zero), 0.0);
    EXPECT_EQ(counter_eu(m, zero, CuMode::Reviewed), 0.0);

    CounterfactualMatrix ntn;
    ntn[CellKind::NTN] = 1.0;
    UtilityModel u;
    u.outcome_u = OutcomeUtilities(0, 0, 0, 1);
    EXPECT_EQ(outcome_eu(ntn, u), 1.0);

    auto no_discovery = screening_utilities();
    no_discovery.discovery_d = CfValues(0, 0, 0, 0);
    EXPECT_EQ(counter_eu(m, no_discovery, CuMode::Reviewed), 0.0);
}

TEST(ExpectedUtility, ModeSelectsMatrix) {
    auto u = screening_utilities();
    u.cu_automated = CfValues(1, 1, 1, 1);
    u.cu_reviewed = CfValues(0, 0, 0, 0);
    const auto m = worked_matrix();
    EXPECT_EQ(counter_eu(m, u, CuMode::Reviewed), 0.0);
    EXPECT_NEAR(counter_eu(m, u, CuMode::Automated), 0.025 * 0.01 + 0.01 * 0.8 + 0.07 * 0.1 + 0.09 * 0.01, 1e-15);
}

TEST(ExpectedUtility, ReportOrderingOfWorkedExample) {
    const auto r = build_report(worked_matrix(), screening_utilities(), CuMode::Reviewed);
    EXPECT_GT(r.outcome_eu, r.unaided_eu);
    EXPECT_GT(r.unaided_eu, r.usage_eu);
    EXPECT_EQ(r.relative_counter_eu, r.counter_eu);
}

TEST(EUProperty, AdditivityIsExact) {
    std::mt19937_64 g(2);
    for (int t = 0; t < kPropertyTrials; ++t) {
        const auto m = random_matrix(g, 0.1);
        const auto u = random_utilities(g);
        for (CuMode mode : {CuMode::Automated, CuMode::Reviewed}) {
            EXPECT_EQ(usage_eu(m, u, mode), outcome_eu(m, u) + counter_eu(m, u, mode));
            const auto r = build_report(m, u, mode);
            EXPECT_EQ(r.usage_eu, r.outcome_eu + r.counter_eu);
            EXPECT_EQ(r.relative_outcome_eu, r.outcome_eu - r.unaided_eu);
            EXPECT_EQ(r.relative_usage_eu, r.usage_eu - r.unaided_eu);
        }
    }
}

TEST(EUProperty, AgreesWithTableOracle) {
    std::mt19937_64 g(3);
    for (int t = 0; t < kPropertyTrials; ++t) {
        const auto m = random_matrix(g, 0.1);
        const auto u = random_utilities(g);
        TableOracle o;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 4; ++c) o.p[r][c] = m[kAllCells[r * 4 + c]];
        o.U = {{{u.outcome_u.at(GroundTruth::T, Decision::T), u.outcome_u.at(GroundTruth::T, Decision::F)},
                {u.outcome_u.at(GroundTruth::F, Decision::T), u.outcome_u.at(GroundTruth::F, Decision::F)}}};
        const auto& cu = u.cu_reviewed;
        const auto& d = u.discovery_d;
        o.d = {{{d[CfCell::CTP], d[CfCell::CFN]}, {d[CfCell::CFP], d[CfCell::CTN]}}};
        o.cu = {{{cu[CfCell::CTP], cu[CfCell::CFN]}, {cu[CfCell::CFP], cu[CfCell::CTN]}}};
        const auto rep = build_report(m, u, CuMode::Reviewed);
        EXPECT_NEAR(rep.outcome_eu, o.outcome(), 1e-12);
        EXPECT_NEAR(rep.unaided_eu, o.unaided_eu(), 1e-12);
        EXPECT_NEAR(rep.counter_eu, o.counter(), 1e-12);
    }
}

TEST(EUProperty, ZeroCounterfactualCollapse) {
    std::mt19937_64 g(4);
    for (int t = 0; t < kPropertyTrials; ++t) {
        auto m = random_matrix(g);
        double moved = 0;
        for (CfCell c : kAllCfCells) {
            moved += m[cell_of(c)];
            m[cell_of(c)] = 0;
        }
        m[CellKind::NTP] += moved;
        const auto u = random_utilities(g);
        const auto r = build_report(m, u, CuMode::Reviewed);
        EXPECT_EQ(r.counter_eu, 0.0);
        EXPECT_NEAR(r.outcome_eu, r.unaided_eu, 1e-12);
        EXPECT_NEAR(r.usage_eu, r.unaided_eu, 1e-12);
    }
}

TEST(EUProperty, AccuracyGainComesFromCounterfactualCells) {
    std::mt19937_64 g(5);
    for (int t = 0; t < kPropertyTrials; ++t) {
        const auto m = random_matrix(g);
        const auto p = partition(m);
        const double pos = m.ground_truth_mass(GroundTruth::T);
        const double neg = m.ground_truth_mass(GroundTruth::F);
        EXPECT_NEAR(sensitivity(p.aided) - sensitivity(p.unaided), (m[CellKind::CTP] - m[CellKind::CFN]) / pos, 1e-12);
        EXPECT_NEAR(specificity(p.aided) - specificity(p.unaided), (m[CellKind::CTN] - m[CellKind::CFP]) / neg, 1e-12);
    }
}

TEST(EUProperty, CounterEuNonincreasingInDiscoveryWhenUtilitiesNonpositive) {
    std::mt19937_64 g(6);
    std::uniform_real_distribution<double> neg(-20.0, 0.0), step(0.0, 0.2);
    for (int t = 0; t < kPropertyTrials; ++t) {
        const auto m = random_matrix(g, 0.1);
        auto u = random_utilities(g);
        u.cu_reviewed = CfValues(neg(g), neg(g), neg(g), neg(g));
        for (CfCell c : kAllCfCells) {
            auto bumped = u;
            bumped.discovery_d[c] = std::min(1.0, u.discovery_d[c] + step(g));
            EXPECT_LE(counter_eu(m, bumped, CuMode::Reviewed), counter_eu(m, u, CuMode::Reviewed) + 1e-15);
        }
    }
}

TEST(EUProperty, ContributionsSumToCounterEu) {
    std::mt19937_64 g(7);
    for (int t = 0; t < kPropertyTrials; ++t) {
        const auto m = random_matrix(g, 0.1);
        const auto u = random_utilities(g);
        for (CuMode mode : {CuMode::Automated, CuMode::Reviewed}) {
            const auto a = discovery_analysis(m, u, mode);
            double sum = 0;
            for (const auto& c : a.cells) sum += c.contribution;
            EXPECT_NEAR(sum, counter_eu(m, u, mode), 1e-12);
            EXPECT_NEAR(a.counter_eu, counter_eu(m, u, mode), 1e-12);
        }
    }
}

// --- discovery analysis -----------------------------------------------------

TEST(Discovery, WorkedExampleIsDominatedByMissedPositives) {
    const auto a = discovery_analysis(worked_matrix(), screening_utilities(), CuMode::Reviewed);
    EXPECT_EQ(a.dominant_cell, CfCell::CFN);
    EXPECT_NEAR(a.cells[index(CfCell::CFN)].contribution, -0.24, 1e-12);
    EXPECT_NEAR(a.counter_eu, -0.24825, 1e-12);
    EXPECT_FALSE(a.one_sided_negative);
}

TEST(Discovery, OnlyNegativeCellDiscoverableIsOneSided) {
    auto u = screening_utilities();
    u.discovery_d = CfValues(0, 0.8, 0, 0);
    EXPECT_TRUE(discovery_analysis(worked_matrix(), u, CuMode::Reviewed).one_sided_negative);
    u.discovery_d = CfValues(0.8, 0.8, 0, 0);
    EXPECT_FALSE(discovery_analysis(worked_matrix(), u, CuMode::Reviewed).one_sided_negative);
}

TEST(Discovery, CellsWithoutMassDoNotCount) {
    auto m = worked_matrix();
    m[CellKind::NTP] += m[CellKind::CTP];
    m[CellKind::CTP] = 0;
    auto u = screening_utilities();
    u.discovery_d = CfValues(0.8, 0.8, 0, 0);
    EXPECT_TRUE(discovery_analysis(m, u, CuMode::Reviewed).one_sided_negative);
}

TEST(Discovery, NothingDiscoverableIsNotOneSided) {
    auto u = screening_utilities();
    u.discovery_d = CfValues(0, 0, 0, 0);
    const auto a = discovery_analysis(worked_matrix(), u, CuMode::Reviewed);
    EXPECT_FALSE(a.one_sided_negative);
    EXPECT_EQ(a.counter_eu, 0.0);
}

TEST(DiscoveryProperty, OneSidedFlagMatchesDefinition) {
    std::mt19937_64 g(8);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int t = 0; t < kPropertyTrials; ++t) {
        const auto m = random_matrix(g, 0.3);
        auto u = random_utilities(g);
        for (CfCell c : kAllCfCells)
            if (coin(g) < 0.4) u.discovery_d[c] = 0;
        bool any = false, all_neg = true;
        for (CfCell c : kAllCfCells)
            if (m[cell_of(c)] > 0 && u.discovery_d[c] > 0) {
                any = true;
                all_neg = all_neg && u.cu_reviewed[c] < 0;
            }
        const auto a = discovery_analysis(m, u, CuMode::Reviewed);
        EXPECT_EQ(a.one_sided_negative, any && all_neg);
        double largest = 0;
        for (const auto& cell : a.cells) largest = std::max(largest, std::abs(cell.contribution));
        EXPECT_EQ(std::abs(a.cells[index(a.dominant_cell)].contribution), largest);
    }
}

// --- union accuracy ------------------------------------------------------------

TEST(UnionAccuracy, Examples) {
    EXPECT_DOUBLE_EQ(independent_union_accuracy(0.7, 0.7), 0.91);
    EXPECT_EQ(independent_union_accuracy(1.0, 0.3), 1.0);
    EXPECT_EQ(independent_union_accuracy(0.5, 0.5), 0.75);
    EXPECT_THROW(independent_union_accuracy(1.2, 0.5), Error);
    EXPECT_THROW(independent_union_accuracy(0.5, -0.1), Error);
}

// --- utilities -----------------------------------------------------------

TEST(Utilities, OutcomeDependsOnlyOnGroundTruthAndAidedDecision) {
    const auto u = screening_utilities();
    for (CellKind c : kAllCells) {
        EXPECT_EQ(u.outcome(c), u.outcome_u.at(ground_truth_of(c), aided_of(c)));
        EXPECT_EQ(u.unaided_outcome(c), u.outcome_u.at(ground_truth_of(c), unaided_of(c)));
        if (!is_counterfactual(c)) {
            EXPECT_EQ(u.counter_value(c, CuMode::Automated), 0.0);
            EXPECT_EQ(u.counter_value(c, CuMode::Reviewed), 0.0);
        }
    }
}

TEST(Utilities, ValidationRejectsOutOfRangeDiscovery) {
    auto u = screening_utilities();
    u.discovery_d[CfCell::CFP] = 1.5;
    try {
        validate_utilities(u, "utilities");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.field_path(), "utilities.discovery_d.CFP");
    }
}
