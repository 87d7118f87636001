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

#include "csipm/cli.hpp"
#include "csipm/checkpoint.hpp"
#include "csipm/config.hpp"
#include "csipm/error.hpp"
#include "csipm/evaluation.hpp"
#include "csipm/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <ostream>
#include <set>

namespace csipm::cli
{
    std::size_t default_target_instances(int row_distance)
    {
        switch (row_distance)
        {
        case 250: return 8860;
        case 500: return 17733;
        case 750: return 27805;
        default: return 0;
        }
    }

    namespace
    {
        struct Globals
        {
            std::string config_path;
            std::optional<std::uint64_t> seed;
            std::string out;
            std::vector<std::string> overrides;
        };

        RunConfig resolve_config(const Globals &g)
        {
            RunConfig config;
            if (!g.config_path.empty())
                config = load_config(g.config_path);
            for (const std::string &kv : g.overrides)
            {
                const auto eq = kv.find('=');
                if (eq == std::string::npos)
                    throw InvalidConfig("--set expects key=value, got '" + kv + "'");
                const auto key = io::split_whitespace(std::string_view(kv).substr(0, eq));
                const auto value = io::split_whitespace(std::string_view(kv).substr(eq + 1));
                if (key.size() != 1 || value.size() != 1)
                    throw InvalidConfig("--set expects key=value, got '" + kv + "'");
                config.set(key[0], value[0]);
            }
            if (g.seed)
                config.seed = *g.seed;
            config.validate();
            return config;
        }

        std::string num(double v)
        {
            std::string s;
            io::append_number(s, v);
            return s;
        }

        // Files of one command. Unless commit() is reached, everything already
        // written is removed again so a failed command leaves no partial output.
        class Outputs
        {
        public:
            Outputs() = default;
            Outputs(const Outputs &) = delete;
            Outputs &operator=(const Outputs &) = delete;
            ~Outputs()
            {
                if (committed_)
                    return;
                for (const auto &p : written_)
                {
                    std::error_code ec;
                    std::filesystem::remove(p, ec);
                }
            }

            void write(const std::filesystem::path &path, const std::string &text)
            {
                io::AtomicFile file(path);
                file.write(text);
                file.commit();
                written_.push_back(path);
            }

            // For writers that manage their own atomic file.
            template <typename Writer>
            void write_with(const std::filesystem::path &path, Writer &&writer)
            {
                writer(path);
                written_.push_back(path);
            }

            void commit() { committed_ = true; }

        private:
            std::vector<std::filesystem::path> written_;
            bool committed_ = false;
        };

        std::string history_csv(const std::vector<EpochStats> &history)
        {
            std::string out = "epoch,train_mse,test_mse\n";
            for (const EpochStats &e : history)
                out += std::to_string(e.epoch) + "," + num(e.train_mse) + "," + num(e.test_mse) + "\n";
            return out;
        }

        Checkpoint checked_checkpoint(const std::string &path, const std::string &features)
        {
            if (!std::filesystem::exists(path))
                throw IoFailure("checkpoint '" + path + "' does not exist");
            Checkpoint ck = load_checkpoint(path);
            if (!features.empty() && FeatureSet::parse(features) != ck.features)
                throw InvalidConfig("checkpoint was trained on '" + ck.features.to_string() + "', not '" + features + "'");
            return ck;
        }

        struct GenerateOptions
        {
            std::optional<int> range;
            std::optional<std::size_t> target;
            std::string trace_out;
        };

        int cmd_generate(const Globals &g, const GenerateOptions &o, std::ostream &out)
        {
            const RunConfig config = resolve_config(g);
            std::vector<int> ranges = o.range ? std::vector<int>{*o.range} : std::vector<int>{250, 500, 750};
            if (!o.trace_out.empty() && ranges.size() != 1)
                throw InvalidConfig("--trace-out needs a single --range");

            Outputs outputs;

            for (int range : ranges)
            {
                if (range < 0)
                    throw InvalidConfig("--range must be >= 0");
                DatasetConfig dc = config.dataset;
                dc.max_row_distance = range;
                dc.target_instances = o.target ? *o.target : default_target_instances(range);
                if (dc.target_instances == 0)
                    throw InvalidConfig("--range " + std::to_string(range) + " has no default size; pass --target-instances");

                std::filesystem::path path;
                if (o.range)
                    path = g.out.empty() ? "dataset_" + std::to_string(range) + ".csv" : g.out;
                else
                    path = std::filesystem::path(g.out.empty() ? "." : g.out) / ("dataset_" + std::to_string(range) + ".csv");

                const Dataset ds = build_dataset(config.setup, dc, config.seed);
                outputs.write_with(path, [&](const std::filesystem::path &p) { serialize_dataset(ds, p); });

                std::set<std::uint64_t> vehicles;
                for (const DatasetInstance &inst : ds.instances)
                    vehicles.insert(inst.vehicle_id);
                out << path.string() << ": " << ds.size() << " instances from " << vehicles.size()
                    << " vehicles (row distance " << range << ")\n";

                if (!o.trace_out.empty())
                {
                    std::vector<Trace> traces;
                    for (std::uint64_t id : vehicles)
                        traces.push_back(vehicle_trace(config.setup, dc, config.seed, id));
                    outputs.write_with(o.trace_out, [&](const std::filesystem::path &p)
                                       { serialize_traces(traces, config.setup.mobility.delta_tau_s, p); });
                    out << o.trace_out << ": " << traces.size() << " traces\n";
                }
            }
            outputs.commit();
            return 0;
        }

        struct TrainOptions
        {
            std::string dataset;
            std::string features;
            std::optional<int> epochs;
            std::optional<double> lr;
            std::string history;
        };

        int cmd_train(const Globals &g, const TrainOptions &o, std::ostream &out, std::ostream &err)
        {
            RunConfig config = resolve_config(g);
            if (o.epochs)
                config.train.epochs = *o.epochs;
            if (o.lr)
                config.train.learning_rate = *o.lr;
            config.train.seed = config.seed;
            config.train.validate();

            const FeatureSet features = FeatureSet::parse(o.features);
            const Dataset ds = deserialize_dataset(o.dataset);
            const std::uint64_t sseed = split_seed(config.seed);
            const PreparedData data = prepare_data(ds, features, config.dataset.window, config.dataset.train_fraction, sseed);

            const int every = std::max(1, config.train.epochs / 10);
            TrainResult result = train(data.train, data.test, config.model, config.train,
                                       [&](const EpochStats &e)
                                       {
                                           if (e.epoch % every == 0 || e.epoch == config.train.epochs)
                                               err << "epoch " << e.epoch << " train_mse " << num(e.train_mse)
                                                   << " test_mse " << num(e.test_mse) << "\n";
                                       });

            Checkpoint ck;
            ck.params = result.params;
            ck.adam = result.adam;
            ck.features = features;
            ck.window = config.dataset.window;
            ck.split_seed = sseed;
            ck.train_fraction = config.dataset.train_fraction;
            ck.standardizer = data.standardizer;

            const std::string ck_path = g.out.empty() ? "model.ckpt" : g.out;
            const std::string hist_path = o.history.empty() ? ck_path + ".history.csv" : o.history;
            Outputs outputs;
            outputs.write(ck_path, format_checkpoint(ck));
            outputs.write(hist_path, history_csv(result.history));
            outputs.commit();
            out << "train windows " << data.train.size() << ", test windows " << data.test.size() << "\n";
            out << "initial test_mse " << num(result.initial_test_mse) << "\n";
            out << "final test_mse " << num(result.history.back().test_mse) << "\n";
            out << "wrote " << ck_path << " and " << hist_path << "\n";
            return 0;
        }

        struct EvalOptions
        {
            std::string checkpoint;
            std::string dataset;
            std::string features;
            bool oracle_stub = false;
        };

        int cmd_eval(const Globals &g, const EvalOptions &o, std::ostream &out)
        {
            const RunConfig config = resolve_config(g);
            const Dataset ds = deserialize_dataset(o.dataset);
            WindowSet test;
            std::vector<double> predictions;
            std::string source;
            if (o.oracle_stub)
            {
                // Test hook: predictions are the labels themselves.
                if (o.features.empty())
                    throw InvalidConfig("--oracle-stub needs --features");
                const PreparedData data = prepare_data(ds, FeatureSet::parse(o.features), config.dataset.window,
                                                       config.dataset.train_fraction, split_seed(config.seed));
                test = data.test;
                predictions = test.targets;
                source = "oracle-stub";
            }
            else
            {
                if (o.checkpoint.empty())
                    throw InvalidConfig("eval needs --checkpoint (or --oracle-stub)");
                const Checkpoint ck = checked_checkpoint(o.checkpoint, o.features);
                test = prepare_test_windows(ds, ck);
                predictions = predict_all(ck.params, test);
                source = o.checkpoint;
            }
            const double mse = evaluate_mse(predictions, test);

            std::string report = "model " + source + "\n";
            report += "dataset " + o.dataset + "\n";
            report += "features " + test.features.to_string() + "\n";
            report += "test_windows " + std::to_string(test.size()) + "\n";
            report += "test_mse " + num(mse) + "\n";
            Outputs outputs;
            outputs.write(g.out.empty() ? "eval_report.txt" : g.out, report);
            outputs.commit();
            out << "test_mse " << num(mse) << "\n";
            return 0;
        }

        struct AblateOptions
        {
            std::vector<std::string> datasets;
            std::string feature_sets;
            std::optional<int> epochs;
        };

        int cmd_ablate(const Globals &g, const AblateOptions &o, std::ostream &out, std::ostream &err)
        {
            RunConfig config = resolve_config(g);
            if (o.epochs)
                config.train.epochs = *o.epochs;
            config.train.validate();

            std::vector<FeatureSet> sets;
            if (o.feature_sets.empty())
                sets = FeatureSet::ablation_defaults();
            else
                for (auto token : io::split(o.feature_sets, ','))
                {
                    const FeatureSet f = FeatureSet::parse(token);
                    if (std::find(sets.begin(), sets.end(), f) != sets.end())
                        throw InvalidConfig("feature set '" + std::string(token) + "' listed twice");
                    sets.push_back(f);
                }

            std::vector<NamedDataset> datasets;
            for (const std::string &entry : o.datasets)
            {
                // "name=path" or a plain path named after its stem.
                const auto eq = entry.find('=');
                NamedDataset nd;
                const std::string path = eq == std::string::npos ? entry : entry.substr(eq + 1);
                nd.name = eq == std::string::npos ? std::filesystem::path(entry).stem().string() : entry.substr(0, eq);
                if (nd.name.empty() || nd.name.find_first_of(",|") != std::string::npos)
                    throw InvalidConfig("dataset name '" + nd.name + "' must be non-empty without ',' or '|'");
                for (const NamedDataset &other : datasets)
                    if (other.name == nd.name)
                        throw InvalidConfig("dataset name '" + nd.name + "' used twice");
                nd.data = deserialize_dataset(path);
                datasets.push_back(std::move(nd));
            }

            AblationOptions options;
            options.model = config.model;
            options.train = config.train;
            options.window = config.dataset.window;
            options.train_fraction = config.dataset.train_fraction;
            options.master_seed = config.seed;

            AblationReport report;
            report.feature_sets = sets;
            for (const NamedDataset &nd : datasets)
            {
                for (FeatureSet f : sets)
                {
                    const AblationReport one = run_ablation({nd}, {f}, options);
                    err << nd.name << " " << f.to_string() << " test_mse " << num(one.cells.front().mse) << "\n";
                    report.cells.push_back(one.cells.front());
                }
                report.datasets.push_back(nd.name);
            }

            const std::string prefix = g.out.empty() ? "ablation" : g.out;
            std::string history = "dataset,feature_set,epoch,train_mse,test_mse\n";
            for (const AblationCell &c : report.cells)
                for (const EpochStats &e : c.history)
                    history += c.dataset + "," + c.features.to_string() + "," + std::to_string(e.epoch) + "," +
                               num(e.train_mse) + "," + num(e.test_mse) + "\n";
            Outputs outputs;
            outputs.write(prefix + ".txt", report.to_table());
            outputs.write(prefix + ".csv", report.to_csv());
            outputs.write(prefix + "_history.csv", history);
            outputs.commit();
            out << report.to_table();
            return 0;
        }

        struct PlotOptions
        {
            std::string checkpoint;
            std::string dataset;
            std::string features;
            std::vector<std::size_t> instances{0};
        };

        int cmd_plot_export(const Globals &g, const PlotOptions &o, std::ostream &out)
        {
            resolve_config(g);
            const Checkpoint ck = checked_checkpoint(o.checkpoint, o.features);
            const Dataset ds = deserialize_dataset(o.dataset);
            const WindowSet test = prepare_test_windows(ds, ck);
            const std::string prefix = g.out.empty() ? "constellation" : g.out;

            for (std::size_t i : o.instances)
                if (i >= test.size())
                    throw InvalidConfig("instance " + std::to_string(i) + " out of range (test set has " +
                                        std::to_string(test.size()) + " windows)");
            Outputs outputs;
            for (std::size_t i : o.instances)
            {
                const std::vector<double> pred = model_forward(ck.params, test[i]);
                ConstellationExport data;
                data.dataset = std::filesystem::path(o.dataset).stem().string();
                data.feature_set = ck.features.to_string();
                data.instance = "window=" + std::to_string(i) + " vehicle=" + std::to_string(test.info[i].vehicle_id) +
                                " t=" + num(test.info[i].t_s);
                data.truth = unflatten_csi(test[i].target);
                data.predicted = unflatten_csi(pred);
                const std::string path = prefix + "_" + std::to_string(i) + ".csv";
                outputs.write(path, format_constellation(data));

                const NearestResult nearest = nearest_instance(pred, test);
                out << path << ": nearest by MSE " << nearest.by_mse << ", by MAE " << nearest.by_mae
                    << (nearest.agree() ? " (metrics agree)" : " (metrics differ)") << "\n";
            }
            outputs.commit();
            return 0;
        }
    }

    int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
    {
        CLI::App app{"Self-trained CSI prediction for mmWave vehicular users"};
        app.name("csipm");
        app.require_subcommand(1);
        app.allow_extras(false);
        app.fallthrough();

        Globals g;
        app.add_option("--config", g.config_path, "Configuration file of 'section.key = value' lines")
            ->check(CLI::ExistingFile);
        app.add_option("--seed", g.seed, "Master seed (overrides run.seed)");
        app.add_option("--out", g.out, "Output path (see each subcommand)");
        app.add_option("--set", g.overrides, "Override a configuration key, e.g. --set train.batch_size=32");

        GenerateOptions gen;
        auto *generate = app.add_subcommand("generate", "Simulate vehicles and write auto-labelled datasets");
        generate->add_option("--range", gen.range,
                             "Keep instances within this many grid rows of the gNB row and write one dataset to "
                             "--out (default dataset_<range>.csv). Without it, the 250, 500 and 750 datasets are "
                             "written into the --out directory");
        generate->add_option("--target-instances", gen.target,
                             "Minimum number of instances (default 8860, 17733 or 27805 by range)");
        generate->add_option("--trace-out", gen.trace_out, "Also write the vehicle traces (needs --range)");

        TrainOptions tr;
        auto *train_cmd = app.add_subcommand("train", "Train a predictor; --out is the checkpoint (default model.ckpt)");
        train_cmd->add_option("--dataset", tr.dataset, "Dataset file")->required()->check(CLI::ExistingFile);
        train_cmd->add_option("--features", tr.features, "Feature set, e.g. csi1+csi2+pos")->required();
        train_cmd->add_option("--epochs", tr.epochs, "Training epochs (overrides train.epochs)");
        train_cmd->add_option("--lr", tr.lr, "Learning rate (overrides train.learning_rate)");
        train_cmd->add_option("--history", tr.history, "Per-epoch loss file (default <checkpoint>.history.csv)");

        EvalOptions ev;
        auto *eval = app.add_subcommand("eval", "Test-split MSE of a checkpoint; --out is the report (default eval_report.txt)");
        eval->add_option("--checkpoint", ev.checkpoint, "Checkpoint file");
        eval->add_option("--dataset", ev.dataset, "Dataset file")->required()->check(CLI::ExistingFile);
        eval->add_option("--features", ev.features, "Feature set; must match the checkpoint if given");
        eval->add_flag("--oracle-stub", ev.oracle_stub, "Test hook: predict the labels exactly instead of loading a model");

        AblateOptions ab;
        auto *ablate = app.add_subcommand("ablate", "Train one model per dataset and feature set; --out is the file prefix "
                                                    "(default ablation)");
        ablate->add_option("--datasets", ab.datasets, "Dataset files, each 'path' or 'name=path'")->required();
        ablate->add_option("--feature-sets", ab.feature_sets, "Comma-separated feature sets (default: the ten table columns)");
        ablate->add_option("--epochs", ab.epochs, "Training epochs per cell (overrides train.epochs)");

        PlotOptions pl;
        auto *plot = app.add_subcommand("plot-export", "Write true vs predicted constellations of test windows; --out is the "
                                                       "file prefix (default constellation)");
        plot->add_option("--checkpoint", pl.checkpoint, "Checkpoint file")->required();
        plot->add_option("--dataset", pl.dataset, "Dataset file")->required()->check(CLI::ExistingFile);
        plot->add_option("--features", pl.features, "Feature set; must match the checkpoint if given");
        plot->add_option("--instances", pl.instances, "Test window indices to export")->delimiter(',');

        try
        {
            std::vector<std::string> reversed(args.rbegin(), args.rend());
            app.parse(reversed);
        }
        catch (const CLI::ParseError &e)
        {
            return app.exit(e, out, err);
        }

        try
        {
            if (generate->parsed())
                return cmd_generate(g, gen, out);
            if (train_cmd->parsed())
                return cmd_train(g, tr, out, err);
            if (eval->parsed())
                return cmd_eval(g, ev, out);
            if (ablate->parsed())
                return cmd_ablate(g, ab, out, err);
            if (plot->parsed())
                return cmd_plot_export(g, pl, out);
        }
        catch (const std::exception &e)
        {
            err << "error: " << e.what() << "\n";
            return 1;
        }
        return 1;
    }

    int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
    {
        std::vector<std::string> args;
        for (int i = 1; i < argc; ++i)
            args.emplace_back(argv[i]);
        return run(args, out, err);
    }
}
