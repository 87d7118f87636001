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

#include "csipm/evaluation.hpp"
#include "csipm/error.hpp"
#include "csipm/io.hpp"
#include "csipm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace csipm
{
    PreparedData prepare_data(const Dataset &dataset, FeatureSet features, int window, double train_fraction,
                              std::uint64_t seed)
    {
        const auto [train_part, test_part] = split(dataset, train_fraction, seed);
        PreparedData out;
        out.train = make_windows(train_part, features, window);
        out.test = make_windows(test_part, features, window);
        if (out.train.empty())
            throw EmptySplit("training split yields no windows of length " + std::to_string(window));
        if (out.test.empty())
            throw EmptySplit("test split yields no windows of length " + std::to_string(window));
        out.standardizer = Standardizer::fit(out.train);
        out.standardizer.apply(out.train);
        out.standardizer.apply(out.test);
        return out;
    }

    WindowSet prepare_test_windows(const Dataset &dataset, const Checkpoint &checkpoint)
    {
        if (dataset.num_antennas * 2 != checkpoint.params.output_width())
            throw WidthMismatch("dataset has M=" + std::to_string(dataset.num_antennas) + " but the model predicts M=" +
                                std::to_string(checkpoint.params.output_width() / 2));
        const auto parts = split(dataset, checkpoint.train_fraction, checkpoint.split_seed);
        WindowSet test = make_windows(parts.second, checkpoint.features, checkpoint.window);
        if (test.empty())
            throw EmptySplit("test split yields no windows of length " + std::to_string(checkpoint.window));
        checkpoint.standardizer.apply(test);
        return test;
    }

    std::uint64_t split_seed(std::uint64_t master_seed)
    {
        return derive_seed(master_seed, stream::split);
    }

    std::uint64_t cell_seed(std::uint64_t master_seed, const std::string &dataset, FeatureSet features)
    {
        // FNV-1a keeps the seed independent of which other cells are in the run.
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (unsigned char ch : dataset)
            h = (h ^ ch) * 0x100000001b3ull;
        return derive_seed(master_seed, h, features.mask());
    }

    const AblationCell &AblationReport::cell(const std::string &dataset, FeatureSet features) const
    {
        for (const AblationCell &c : cells)
            if (c.dataset == dataset && c.features == features)
                return c;
        throw InvalidConfig("no ablation cell for (" + dataset + ", " + features.to_string() + ")");
    }

    std::optional<double> AblationReport::mobility_mean(const std::string &dataset) const
    {
        double sum = 0.0;
        int n = 0;
        for (const AblationCell &c : cells)
            if (c.dataset == dataset && !c.features.has(FeatureSet::csi1))
            {
                sum += c.mse;
                ++n;
            }
        if (n == 0)
            return std::nullopt;
        return sum / n;
    }

    namespace
    {
        std::string number(double v)
        {
            std::string s;
            io::append_number(s, v);
            return s;
        }

        std::string_view trim(std::string_view s)
        {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
                s.remove_prefix(1);
            while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
                s.remove_suffix(1);
            return s;
        }

        std::vector<std::string_view> lines(std::string_view text)
        {
            std::vector<std::string_view> out;
            for (auto line : io::split(text, '\n'))
            {
                line = trim(line);
                if (!line.empty())
                    out.push_back(line);
            }
            return out;
        }
    }

    std::string AblationReport::to_table() const
    {
        // Rows are datasets, columns feature sets; cells use the same shortest
        // round-trip text as the CSV so the two renderings parse to equal values.
        std::vector<std::vector<std::string>> grid;
        std::vector<std::string> header{"Data Set"};
        for (FeatureSet f : feature_sets)
            header.push_back(f.display_name());
        header.push_back("Mobility avg.");
        grid.push_back(header);
        for (const std::string &d : datasets)
        {
            std::vector<std::string> row{d};
            for (FeatureSet f : feature_sets)
                row.push_back(number(cell(d, f).mse));
            const auto avg = mobility_mean(d);
            row.push_back(avg ? number(*avg) : "-");
            grid.push_back(row);
        }

        std::vector<std::size_t> widths(header.size(), 0);
        for (const auto &row : grid)
            for (std::size_t c = 0; c < row.size(); ++c)
                widths[c] = std::max(widths[c], row[c].size());

        std::string out;
        for (std::size_t r = 0; r < grid.size(); ++r)
        {
            for (std::size_t c = 0; c < grid[r].size(); ++c)
            {
                out += c == 0 ? "| " : " | ";
                out += grid[r][c];
                out.append(widths[c] - grid[r][c].size(), ' ');
            }
            out += " |\n";
            if (r == 0)
            {
                for (std::size_t c = 0; c < widths.size(); ++c)
                {
                    out += c == 0 ? "|-" : "-|-";
                    out.append(widths[c], '-');
                }
                out += "-|\n";
            }
        }
        return out;
    }

    std::string AblationReport::to_csv() const
    {
        std::string out = "dataset,feature_set,mse\n";
        for (const AblationCell &c : cells)
            out += c.dataset + "," + c.features.to_string() + "," + number(c.mse) + "\n";
        return out;
    }

    std::vector<ParsedCell> parse_ablation_csv(std::string_view text)
    {
        const auto rows = lines(text);
        if (rows.empty() || rows.front() != "dataset,feature_set,mse")
            throw MalformedFile("<ablation csv>", 1, "expected header 'dataset,feature_set,mse'");
        std::vector<ParsedCell> out;
        for (std::size_t i = 1; i < rows.size(); ++i)
        {
            const auto f = io::split(rows[i], ',');
            const auto v = f.size() == 3 ? io::parse_number<double>(f[2]) : std::nullopt;
            if (!v)
                throw MalformedFile("<ablation csv>", i + 1, "expected 'dataset,feature_set,mse'");
            out.push_back({std::string(trim(f[0])), FeatureSet::parse(trim(f[1])).to_string(), *v});
        }
        return out;
    }

    std::vector<ParsedCell> parse_ablation_table(std::string_view text)
    {
        auto cells_of = [](std::string_view line)
        {
            std::vector<std::string_view> out;
            auto parts = io::split(line, '|');
            // Leading and trailing bars produce empty outer parts.
            for (std::size_t i = 1; i + 1 < parts.size(); ++i)
                out.push_back(trim(parts[i]));
            return out;
        };

        const auto rows = lines(text);
        if (rows.size() < 2)
            throw MalformedFile("<ablation table>", 1, "table needs a header and a rule");
        const auto header = cells_of(rows[0]);
        std::vector<std::optional<FeatureSet>> columns;
        for (std::size_t c = 1; c < header.size(); ++c)
        {
            std::optional<FeatureSet> match;
            for (unsigned mask = 1; mask < 32; ++mask)
            {
                if ((mask & FeatureSet::csi2) && !(mask & FeatureSet::csi1))
                    continue;
                if (FeatureSet(mask).display_name() == header[c])
                    match = FeatureSet(mask);
            }
            columns.push_back(match);
        }

        std::vector<ParsedCell> out;
        for (std::size_t r = 2; r < rows.size(); ++r)
        {
            const auto row = cells_of(rows[r]);
            if (row.size() != header.size())
                throw MalformedFile("<ablation table>", r + 1, "row width differs from header");
            for (std::size_t c = 1; c < row.size(); ++c)
            {
                if (!columns[c - 1])
                    continue;
                const auto v = io::parse_number<double>(row[c]);
                if (!v)
                    throw MalformedFile("<ablation table>", r + 1, "bad number '" + std::string(row[c]) + "'");
                out.push_back({std::string(row[0]), columns[c - 1]->to_string(), *v});
            }
        }
        return out;
    }

    AblationReport run_ablation(const std::vector<NamedDataset> &datasets, const std::vector<FeatureSet> &feature_sets,
                                const AblationOptions &options)
    {
        options.train.validate();
        AblationReport report;
        report.feature_sets = feature_sets;
        for (const NamedDataset &nd : datasets)
        {
            report.datasets.push_back(nd.name);
            for (FeatureSet f : feature_sets)
            {
                const PreparedData data =
                    prepare_data(nd.data, f, options.window, options.train_fraction, split_seed(options.master_seed));
                TrainConfig tc = options.train;
                tc.seed = cell_seed(options.master_seed, nd.name, f);
                TrainResult result = train(data.train, data.test, options.model, tc);

                AblationCell cell;
                cell.dataset = nd.name;
                cell.features = f;
                cell.mse = result.history.back().test_mse;
                cell.initial_mse = result.initial_test_mse;
                cell.history = std::move(result.history);
                report.cells.push_back(std::move(cell));
            }
        }
        return report;
    }

    std::vector<double> amplitudes(std::span<const double> flat)
    {
        if (flat.size() % 2 != 0)
            throw ShapeMismatch("flattened CSI must have an even length");
        const std::size_t m = flat.size() / 2;
        std::vector<double> out(m);
        for (std::size_t i = 0; i < m; ++i)
            out[i] = std::hypot(flat[i], flat[m + i]);
        return out;
    }

    NearestResult nearest_instance(std::span<const double> prediction, const WindowSet &test)
    {
        if (test.empty())
            throw EmptySplit("nearest_instance: empty test set");
        if (prediction.size() != static_cast<std::size_t>(test.target_width))
            throw ShapeMismatch("nearest_instance: prediction width differs from label width");

        const std::vector<double> pa = amplitudes(prediction);
        const double m = static_cast<double>(pa.size());
        NearestResult best;
        best.mse = std::numeric_limits<double>::infinity();
        best.mae = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < test.size(); ++i)
        {
            const std::vector<double> la = amplitudes(test[i].target);
            double sq = 0.0, ab = 0.0;
            for (std::size_t k = 0; k < pa.size(); ++k)
            {
                const double d = pa[k] - la[k];
                sq += d * d;
                ab += std::abs(d);
            }
            sq /= m;
            ab /= m;
            if (sq < best.mse)
            {
                best.mse = sq;
                best.by_mse = i;
            }
            if (ab < best.mae)
            {
                best.mae = ab;
                best.by_mae = i;
            }
        }
        return best;
    }

    std::string format_constellation(const ConstellationExport &data)
    {
        if (data.truth.size() != data.predicted.size() || data.truth.empty())
            throw ShapeMismatch("constellation series must be non-empty and of equal length");
        auto clean = [](const std::string &s)
        {
            if (s.find('\n') != std::string::npos)
                throw InvalidConfig("constellation metadata must be single-line");
            return s;
        };
        std::string out = "# csi-constellation v1\n";
        out += "# dataset=" + clean(data.dataset) + "\n";
        out += "# feature_set=" + clean(data.feature_set) + "\n";
        out += "# instance=" + clean(data.instance) + "\n";
        out += "series,index,re,im\n";
        for (const auto *series : {&data.truth, &data.predicted})
        {
            const char *name = series == &data.truth ? "true" : "pred";
            for (std::size_t i = 0; i < series->size(); ++i)
            {
                out += name;
                out += ',';
                io::append_number(out, static_cast<std::uint64_t>(i));
                out += ',';
                io::append_number(out, (*series)[i].real());
                out += ',';
                io::append_number(out, (*series)[i].imag());
                out += '\n';
            }
        }
        return out;
    }

    void export_constellation(const ConstellationExport &data, const std::filesystem::path &path)
    {
        const std::string text = format_constellation(data);
        io::AtomicFile file(path);
        file.write(text);
        file.commit();
    }

    ConstellationExport parse_constellation(std::string_view text)
    {
        const std::string name = "<constellation>";
        const auto all = io::split(text, '\n');
        ConstellationExport out;
        bool header_seen = false, columns_seen = false;
        for (std::size_t n = 0; n < all.size(); ++n)
        {
            const auto line = trim(all[n]);
            if (line.empty())
                continue;
            if (!header_seen)
            {
                if (line != "# csi-constellation v1")
                    throw MalformedFile(name, n + 1, "expected '# csi-constellation v1'");
                header_seen = true;
                continue;
            }
            if (line.front() == '#')
            {
                const auto body = trim(line.substr(1));
                const auto eq = body.find('=');
                if (eq == std::string_view::npos)
                    continue;
                const auto key = body.substr(0, eq);
                const std::string value(body.substr(eq + 1));
                if (key == "dataset")
                    out.dataset = value;
                else if (key == "feature_set")
                    out.feature_set = value;
                else if (key == "instance")
                    out.instance = value;
                continue;
            }
            if (!columns_seen)
            {
                if (line != "series,index,re,im")
                    throw MalformedFile(name, n + 1, "expected 'series,index,re,im'");
                columns_seen = true;
                continue;
            }
            const auto f = io::split(line, ',');
            if (f.size() != 4)
                throw MalformedFile(name, n + 1, "expected 4 fields");
            const auto idx = io::parse_number<std::uint64_t>(f[1]);
            const auto re = io::parse_number<double>(f[2]);
            const auto im = io::parse_number<double>(f[3]);
            if (!idx || !re || !im)
                throw MalformedFile(name, n + 1, "bad number");
            ChannelVector *series = f[0] == "true" ? &out.truth : f[0] == "pred" ? &out.predicted : nullptr;
            if (!series)
                throw MalformedFile(name, n + 1, "series must be 'true' or 'pred'");
            if (*idx != series->size())
                throw MalformedFile(name, n + 1, "indices must be consecutive from 0");
            series->emplace_back(*re, *im);
        }
        if (!columns_seen)
            throw MalformedFile(name, all.size(), "missing data rows");
        if (out.truth.size() != out.predicted.size())
            throw MalformedFile(name, all.size(), "true and pred series differ in length");
        return out;
    }
}
