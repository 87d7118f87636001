// SPDX-License-Identifier: Apache-2.0
//
// csipm - self-trained CSI prediction for mmWave vehicular users
// Copyright (C) 2026 The csipm authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <catch_amalgamated.hpp>

#include "csipm/error.hpp"
#include "csipm/evaluation.hpp"
#include "csipm/io.hpp"
#include "support.hpp"

#include <cmath>
#include <complex>
#include <map>

using namespace csipm;

namespace
{
    // Linear scan written independently of the library: std::abs on complex values.
    std::pair<std::size_t, std::size_t> scan(std::span<const double> pred, const WindowSet &test)
    {
        const std::size_t M = pred.size() / 2;
        auto amp = [M](std::span<const double> v, std::size_t m) { return std::abs(std::complex<double>(v[m], v[M + m])); };
        std::size_t best_sq = 0, best_ab = 0;
        double min_sq = INFINITY, min_ab = INFINITY;
        for (std::size_t i = 0; i < test.size(); ++i)
        {
            double sq = 0, ab = 0;
            for (std::size_t m = 0; m < M; ++m)
            {
                const double d = amp(pred, m) - amp(test[i].target, m);
                sq += d * d;
                ab += std::abs(d);
            }
            if (sq / M < min_sq)
                min_sq = sq / M, best_sq = i;
            if (ab / M < min_ab)
                min_ab = ab / M, best_ab = i;
        }
        return {best_sq, best_ab};
    }

    WindowSet with_targets(const std::vector<std::vector<double>> &targets)
    {
        WindowSet ws = support::random_windows(targets.size(), 1, 1, static_cast<int>(targets[0].size()), 1);
        ws.targets.clear();
        for (const auto &t : targets)
            ws.targets.insert(ws.targets.end(), t.begin(), t.end());
        return ws;
    }

    ConstellationExport golden_fixture()
    {
        ConstellationExport c{"fixture", "csi1+csi2+pos", "3", {}, {}};
        for (int m = 0; m < 16; ++m)
        {
            c.truth.emplace_back((m + 1) * 0.0625, -(m + 1) * 0.03125);
            c.predicted.emplace_back((m + 1) * 0.0625 * 0.75, 0.5 - (m + 1) * 0.03125);
        }
        return c;
    }
}

TEST_CASE("Exact-label predictions score zero", "[evaluation]")
{
    const WindowSet ws = support::random_windows(30, 3, 2, 8, 4);
    CHECK(evaluate_mse(ws.targets, ws) == 0.0);
    CHECK_THROWS_AS(evaluate_mse(std::vector<double>(7, 0.0), ws), ShapeMismatch);
}

TEST_CASE("A zero predictor scores the mean squared label", "[evaluation]")
{
    const WindowSet ws = support::random_windows(25, 3, 2, 8, 5, 1e-5);
    double direct = 0.0;
    for (double t : ws.targets)
        direct += t * t;
    direct /= static_cast<double>(ws.targets.size());
    const double got = evaluate_mse(std::vector<double>(ws.targets.size(), 0.0), ws);
    CHECK(std::abs(got - direct) <= 1e-14 * direct);

    // A model whose head is all zeros is a zero predictor.
    const ModelParams p = ModelParams::zeros(2, 10, 8);
    CHECK(evaluate_mse(p, ws) == got);
    CHECK(evaluate_mse(p, ws) == evaluate_mse(p, ws));
}

TEST_CASE("Nearest instance on a three-instance fixture", "[evaluation][nearest]")
{
    // M = 2; amplitudes (1, 1), (2, 2) and (3, 0.5).
    const WindowSet test = with_targets({{1, 0, 0, 1}, {0, 2, 2, 0}, {3, 0.3, 0, 0.4}});
    const std::vector<double> pred{1.8, 0, 0, 1.9};
    const NearestResult r = nearest_instance(pred, test);
    CHECK(r.by_mse == 1);
    CHECK(r.by_mae == 1);
    CHECK(r.agree());
    CHECK(std::abs(r.mse - (0.04 + 0.01) / 2) < 1e-15);
    CHECK(std::abs(r.mae - 0.15) < 1e-15);

    // Squared and absolute distances can disagree: (0, 0.8) vs (0.5, 0.5) against (0, 0).
    const WindowSet split = with_targets({{0, 0.8, 0, 0}, {0.5, 0.5, 0, 0}});
    const NearestResult s = nearest_instance(std::vector<double>{0, 0, 0, 0}, split);
    CHECK(s.by_mse == 1);
    CHECK(s.by_mae == 0);
    CHECK_FALSE(s.agree());
}

TEST_CASE("Nearest instance matches a linear scan", "[evaluation][nearest][oracle]")
{
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        const WindowSet test = support::random_windows(200, 1, 1, 32, seed);
        Rng rng(seed + 1000);
        std::vector<double> pred(32);
        for (double &v : pred)
            v = uniform_real(rng, -1, 1);
        const NearestResult r = nearest_instance(pred, test);
        const auto [sq, ab] = scan(pred, test);
        CHECK(r.by_mse == sq);
        CHECK(r.by_mae == ab);
    }
}

TEST_CASE("A label is its own nearest instance, whatever its phase", "[evaluation][nearest]")
{
    const WindowSet test = support::random_windows(100, 1, 1, 32, 9);
    for (std::size_t i : {std::size_t{0}, std::size_t{42}, std::size_t{99}})
    {
        const auto label = test[i].target;
        const NearestResult r = nearest_instance(label, test);
        CHECK(r.by_mse == i);
        CHECK(r.by_mae == i);
        CHECK(r.mse == 0.0);

        std::vector<double> rotated(32);
        const std::complex<double> phase = std::polar(1.0, 0.7 + static_cast<double>(i));
        for (std::size_t m = 0; m < 16; ++m)
        {
            const auto z = std::complex<double>(label[m], label[16 + m]) * phase;
            rotated[m] = z.real();
            rotated[16 + m] = z.imag();
        }
        CHECK(nearest_instance(rotated, test).by_mse == i);
        CHECK(nearest_instance(rotated, test).by_mae == i);
    }
}

TEST_CASE("Ties go to the lowest instance id", "[evaluation][nearest]")
{
    const WindowSet test = with_targets({{3, 0, 0, 0}, {1, 1, 0, 0}, {0, 1, 1, 0}, {1, 1, 0, 0}});
    const NearestResult r = nearest_instance(std::vector<double>{1, 1, 0, 0}, test);
    CHECK(r.by_mse == 1);
    CHECK(r.by_mae == 1);
    WindowSet empty = test;
    empty.starts.clear();
    CHECK_THROWS_AS(nearest_instance(std::vector<double>{1, 1, 0, 0}, empty), EmptySplit);
}

TEST_CASE("Constellation files round-trip and match the golden file", "[evaluation][constellation]")
{
    const ConstellationExport c = golden_fixture();
    const std::string text = format_constellation(c);
    CHECK(text == io::read_file(std::filesystem::path(CSIPM_TEST_DATA) / "constellation_golden.csv"));
    CHECK(parse_constellation(text) == c);

    std::size_t truth_rows = 0, pred_rows = 0;
    for (const auto &line : io::split(text, '\n'))
    {
        truth_rows += line.rfind("true,", 0) == 0;
        pred_rows += line.rfind("pred,", 0) == 0;
    }
    CHECK(truth_rows == 16);
    CHECK(pred_rows == 16);

    // Values that need all 17 digits survive too.
    ConstellationExport odd = c;
    odd.truth[3] = {0.1 + 0.2, -1.0 / 3.0};
    odd.predicted[7] = {1e-300, 6.02214076e23};
    const auto dir = support::scratch("constellation");
    export_constellation(odd, dir / "c.csv");
    CHECK(parse_constellation(io::read_file(dir / "c.csv")) == odd);

    odd.predicted.pop_back();
    CHECK_THROWS_AS(format_constellation(odd), ShapeMismatch);
    // A regular file where the parent directory should be.
    export_constellation(c, dir / "blocker");
    CHECK_THROWS_AS(export_constellation(c, dir / "blocker" / "c.csv"), IoFailure);
}

TEST_CASE("Ablation table and CSV describe the same cells", "[evaluation][ablation]")
{
    const std::vector<NamedDataset> datasets{{"250", support::small_dataset(1000, 1)},
                                             {"500", support::small_dataset(1000, 2, 500)}};
    const std::vector<FeatureSet> sets{FeatureSet::parse("pos"), FeatureSet::parse("acc+speed"),
                                       FeatureSet::parse("csi1+pos")};
    AblationOptions opt;
    opt.train.epochs = 2;
    opt.train.learning_rate = 1e-3;
    opt.master_seed = 11;
    const AblationReport report = run_ablation(datasets, sets, opt);
    REQUIRE(report.cells.size() == 6);
    for (const auto &c : report.cells)
    {
        CHECK(c.mse >= 0.0);
        CHECK(std::isfinite(c.mse));
        CHECK(c.history.size() == 2);
        CHECK(c.mse == c.history.back().test_mse);
    }

    const auto from_csv = parse_ablation_csv(report.to_csv());
    const auto from_table = parse_ablation_table(report.to_table());
    REQUIRE(from_csv.size() == 6);
    REQUIRE(from_table.size() == 6);
    for (std::size_t i = 0; i < 6; ++i)
    {
        CHECK(from_csv[i].dataset == from_table[i].dataset);
        CHECK(from_csv[i].feature_set == from_table[i].feature_set);
        CHECK(from_csv[i].mse == from_table[i].mse);
        const auto &cell = report.cell(from_csv[i].dataset, FeatureSet::parse(from_csv[i].feature_set));
        CHECK(cell.mse == from_csv[i].mse);
    }

    const auto mean = report.mobility_mean("250");
    REQUIRE(mean.has_value());
    CHECK(*mean == (report.cell("250", sets[0]).mse + report.cell("250", sets[1]).mse) / 2);
    CHECK(report.to_table().find("Mobility avg.") != std::string::npos);

    // Same seeds, same report.
    const AblationReport again = run_ablation(datasets, sets, opt);
    CHECK(again.to_csv() == report.to_csv());
    CHECK(again.to_table() == report.to_table());
}

TEST_CASE("All cells of a dataset share one test split", "[evaluation][ablation]")
{
    const Dataset ds = support::small_dataset(600, 3);
    const PreparedData a = prepare_data(ds, FeatureSet::parse("pos"), 10, 0.7, split_seed(5));
    const PreparedData b = prepare_data(ds, FeatureSet::parse("acc+speed+pos+csi1"), 10, 0.7, split_seed(5));
    REQUIRE(a.test.size() == b.test.size());
    for (std::size_t i = 0; i < a.test.size(); ++i)
    {
        CHECK(a.test.info[i].vehicle_id == b.test.info[i].vehicle_id);
        CHECK(a.test.info[i].t_s == b.test.info[i].t_s);
    }
    CHECK(a.test.targets == b.test.targets);
    CHECK(cell_seed(5, "250", FeatureSet::parse("pos")) != cell_seed(5, "500", FeatureSet::parse("pos")));
    CHECK(cell_seed(5, "250", FeatureSet::parse("pos")) != cell_seed(5, "250", FeatureSet::parse("acc")));
}

TEST_CASE("A constant-zero dummy channel barely changes the result", "[evaluation][ablation]")
{
    const Dataset ds = support::small_dataset(1500, 31);
    const PreparedData base = prepare_data(ds, FeatureSet::parse("pos"), 10, 0.7, split_seed(1));

    // Insert a zero column after the two position channels.
    auto pad = [](const WindowSet &w)
    {
        WindowSet out = w;
        out.width = w.width + 1;
        out.rows.clear();
        for (std::size_t r = 0; r < w.num_rows(); ++r)
        {
            out.rows.insert(out.rows.end(), w.rows.begin() + static_cast<std::ptrdiff_t>(r * 2),
                            w.rows.begin() + static_cast<std::ptrdiff_t>(r * 2 + 2));
            out.rows.push_back(0.0);
        }
        return out;
    };
    const WindowSet tr = pad(base.train), te = pad(base.test);

    TrainConfig cfg;
    cfg.learning_rate = 1e-3;
    cfg.epochs = 60;
    cfg.seed = 8;
    const double plain = train(base.train, base.test, {}, cfg).history.back().test_mse;
    const double padded = train(tr, te, {}, cfg).history.back().test_mse;
    INFO("plain " << plain << " padded " << padded);
    CHECK(padded <= 2 * plain);
    CHECK(plain <= 2 * padded);
}
