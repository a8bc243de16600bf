// patentcls: one binary, verb subcommands, one per pipeline stage.
// Exit codes: 0 ok, 2 input/parse error, 3 config mismatch, 4 internal error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "patentcls/corpus.hpp"
#include "patentcls/costs.hpp"
#include "patentcls/decoding.hpp"
#include "patentcls/error.hpp"
#include "patentcls/evaluation.hpp"
#include "patentcls/exports.hpp"
#include "patentcls/metrics.hpp"
#include "patentcls/postparse.hpp"
#include "patentcls/prompting.hpp"
#include "patentcls/retrieval.hpp"
#include "patentcls/stats.hpp"
#include "patentcls/taxonomy.hpp"

namespace {

using namespace patentcls;

constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;
constexpr int kExitInternal = 4;

// Write via temp file + rename so a failed run never leaves a partial output.
void write_atomic(const std::string& path, const std::function<void(std::ostream&)>& fn) {
    if (auto dir = std::filesystem::path(path).parent_path(); !dir.empty())
        std::filesystem::create_directories(dir);
    std::string tmp = path + ".tmp";
    try {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw ParseError("cannot open for writing: " + tmp);
        fn(out);
        out.flush();
        if (!out) throw ParseError("write failed: " + tmp);
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(tmp, ec);
        throw;
    }
    std::filesystem::rename(tmp, path);
}

std::pair<double, double> parse_pair(const std::string& spec, const char* what) {
    auto comma = spec.find(',');
    if (comma == std::string::npos)
        throw ConfigError(std::string(what) + ": expected two comma-separated numbers, got " + spec);
    try {
        return {std::stod(spec.substr(0, comma)), std::stod(spec.substr(comma + 1))};
    } catch (const std::exception&) {
        throw ConfigError(std::string(what) + ": expected two comma-separated numbers, got " + spec);
    }
}

std::map<std::string, std::set<std::string>> gold_by_id(const corpus::PatentCorpus& c) {
    std::map<std::string, std::set<std::string>> out;
    for (const auto& r : c.records) out[r.id] = r.gold_labels;
    return out;
}

std::map<std::string, std::set<std::string>> mask_from_allowed(
    const std::map<std::string, retrieval::AllowedLabelSet>& sets) {
    std::map<std::string, std::set<std::string>> mask;
    for (const auto& [id, s] : sets) {
        auto& m = mask[id];
        for (const auto& [code, _] : s.ranked) m.insert(code);
    }
    return mask;
}

struct StatsArgs {
    std::string corpus_path, schema = "jsonl", out_dir;
    std::string format = "csv";
};

void cmd_stats(const StatsArgs& a) {
    auto c = corpus::load_corpus(a.corpus_path, a.schema);
    auto rep = corpus::frequency_report(c);
    write_atomic(a.out_dir + "/frequency.csv",
                 [&](std::ostream& out) { exports::write_frequency_csv(rep, out); });
    auto summary = exports::frequency_summary_json(rep);
    write_atomic(a.out_dir + "/summary.json",
                 [&](std::ostream& out) { out << summary.dump(2) << '\n'; });
    if (a.format == "json")
        std::cout << summary.dump(2) << '\n';
    else
        std::cout << "patents=" << rep.patent_count << " subclasses=" << rep.counts.size()
                  << " mean_labels=" << rep.mean_labels << '\n';
}

struct RetrieveArgs {
    std::string embeddings, queries, out;
    std::size_t k = 20;
};

void cmd_retrieve(const RetrieveArgs& a) {
    auto matrix = retrieval::load_embeddings(a.embeddings);
    auto queries = retrieval::load_query_vectors(a.queries);
    std::map<std::string, retrieval::AllowedLabelSet> sets;
    for (const auto& [id, vec] : queries) sets[id] = retrieval::allowed_set(vec, matrix, a.k, id);
    write_atomic(a.out, [&](std::ostream& out) { evaluation::write_allowed_sets(sets, out); });
    std::cout << "wrote " << sets.size() << " allowed sets to " << a.out << '\n';
}

struct PromptArgs {
    std::string test_path, schema = "jsonl", regime, out;
    std::string train_path, allowed_path, defs_path;
    std::vector<std::size_t> static_indices = {2, 27};
    std::size_t dynamic_count = 3;
};

void cmd_prompt(const PromptArgs& a) {
    evaluation::RunManifest manifest;
    manifest.kind = evaluation::PipelineKind::LlmPrompted;
    manifest.regime = prompting::regime_from_name(a.regime);
    manifest.fewshot.static_indices = a.static_indices;
    manifest.fewshot.dynamic_count = a.dynamic_count;

    auto test = corpus::load_corpus(a.test_path, a.schema);
    std::optional<corpus::PatentCorpus> train;
    std::optional<retrieval::TfidfIndex> tfidf;
    if (!a.train_path.empty()) {
        train = corpus::load_corpus(a.train_path, a.schema);
        tfidf = retrieval::fit_tfidf(*train);
    }
    std::optional<std::map<std::string, retrieval::AllowedLabelSet>> allowed;
    if (!a.allowed_path.empty()) allowed = evaluation::read_allowed_sets(a.allowed_path);
    std::optional<taxonomy::DefinitionCatalog> catalog;
    if (!a.defs_path.empty()) catalog = taxonomy::load_definitions(a.defs_path);

    auto bundles = evaluation::prepare_prompts(
        manifest, test, train ? &*train : nullptr, tfidf ? &*tfidf : nullptr,
        allowed ? &*allowed : nullptr, catalog ? &*catalog : nullptr);
    write_atomic(a.out, [&](std::ostream& out) {
        for (const auto& b : bundles) {
            nlohmann::json j;
            j["id"] = b.patent_id;
            j["system"] = b.system_text;
            j["user"] = b.user_text;
            if (!b.fewshot_ids.empty()) j["fewshot_ids"] = b.fewshot_ids;
            if (!b.allowed_codes.empty()) j["allowed_codes"] = b.allowed_codes;
            j["manifest_digest"] = manifest.digest();
            out << j.dump() << '\n';
        }
    });
    std::cout << "wrote " << bundles.size() << " prompts to " << a.out
              << " (digest " << manifest.digest() << ")\n";
}

struct ParseArgs {
    std::string raw, out;
    std::string allowed_path, corpus_path, schema = "jsonl";
    bool nonempty = false;
    std::size_t cap = 7;
};

void cmd_parse(const ParseArgs& a) {
    auto gens = evaluation::read_generations(a.raw);
    std::map<std::string, retrieval::AllowedLabelSet> allowed;
    if (!a.allowed_path.empty()) allowed = evaluation::read_allowed_sets(a.allowed_path);
    std::map<std::string, const corpus::PatentRecord*> by_id;
    std::optional<corpus::PatentCorpus> c;
    if (!a.corpus_path.empty()) {
        c = corpus::load_corpus(a.corpus_path, a.schema);
        for (const auto& r : c->records) by_id[r.id] = &r;
    }

    std::vector<evaluation::PredictionRow> rows;
    for (const auto& [id, raw_output] : gens) {
        std::optional<retrieval::AllowedLabelSet> al;
        if (auto it = allowed.find(id); it != allowed.end()) al = it->second;
        auto outcome = postparse::parse_output(raw_output, al, a.nonempty, a.cap);
        evaluation::PredictionRow row;
        row.id = id;
        if (auto it = by_id.find(id); it != by_id.end()) {
            row.text = corpus::document_text(*it->second);
            row.gold_labels = it->second->gold_labels;
        }
        row.pred_labels = outcome.labels;
        row.raw_output = raw_output;
        row.parse_path = postparse::parse_path_name(outcome.path);
        if (al) {
            std::vector<std::string> codes;
            for (const auto& [code, _] : al->ranked) codes.push_back(code);
            row.allowed_codes = codes;
        }
        rows.push_back(std::move(row));
    }
    write_atomic(a.out, [&](std::ostream& out) { evaluation::write_predictions_jsonl(rows, out); });
    std::cout << "parsed " << rows.size() << " generations into " << a.out << '\n';
}

struct DecodeArgs {
    std::string probs, schema = "csv", corpus_path, corpus_schema = "jsonl", out_dir;
    std::string allowed_path, dev_probs, dev_corpus;
    double threshold = 0.5;
    bool calibrate = false;
    double grid_step = 0.005;
    std::size_t cap = 7;
};

void cmd_decode(const DecodeArgs& a) {
    auto probs = decoding::load_probability_matrix(a.probs, a.schema);
    auto test = corpus::load_corpus(a.corpus_path, a.corpus_schema);

    evaluation::RunManifest manifest;
    manifest.kind = evaluation::PipelineKind::EncoderDecoded;
    manifest.cap = a.cap;
    manifest.threshold = a.threshold;
    if (a.calibrate) {
        if (a.dev_probs.empty() || a.dev_corpus.empty())
            throw ConfigError("decode --calibrate needs --dev-probs and --dev-corpus");
        auto dev = decoding::load_probability_matrix(a.dev_probs, a.schema);
        auto dev_gold = gold_by_id(corpus::load_corpus(a.dev_corpus, a.corpus_schema));
        manifest.threshold = decoding::calibrate_threshold(dev, dev_gold, a.grid_step, a.cap);
        std::cout << "calibrated threshold " << manifest.threshold << '\n';
    }

    std::optional<std::map<std::string, std::set<std::string>>> mask;
    if (!a.allowed_path.empty())
        mask = mask_from_allowed(evaluation::read_allowed_sets(a.allowed_path));

    auto run = evaluation::run_encoder_pipeline(manifest, test, probs, mask);
    write_atomic(a.out_dir + "/predictions.jsonl",
                 [&](std::ostream& out) { evaluation::write_predictions_jsonl(run.rows, out); });
    nlohmann::json rep = exports::metric_report_json(run.report);
    rep["threshold"] = manifest.threshold;
    rep["manifest_digest"] = manifest.digest();
    write_atomic(a.out_dir + "/report.json",
                 [&](std::ostream& out) { out << rep.dump(2) << '\n'; });
    std::cout << "micro_f1=" << run.report.micro_prf.f1 << " macro_f1=" << run.report.macro_prf.f1
              << '\n';
}

struct EvaluateArgs {
    std::string predictions, out_dir;
    std::size_t bootstrap_b = 0;  // 0 = skip CIs
    std::uint64_t seed = 0;
};

void cmd_evaluate(const EvaluateArgs& a) {
    auto rows = evaluation::read_predictions_jsonl(a.predictions);
    auto records = evaluation::to_metric_records(rows);
    auto report = metrics::full_report(records);
    auto table = metrics::confusion(records, taxonomy::Level::Subclass);
    nlohmann::json j = exports::metric_report_json(report);
    j["row_count"] = rows.size();
    if (a.bootstrap_b > 0) {
        j["bootstrap"] = {
            {"micro_f1", exports::bootstrap_json(stats::bootstrap_ci(
                             table, stats::BootstrapMetric::MicroF1, a.bootstrap_b, a.seed))},
            {"macro_f1", exports::bootstrap_json(stats::bootstrap_ci(
                             table, stats::BootstrapMetric::MacroF1, a.bootstrap_b, a.seed))}};
    }
    write_atomic(a.out_dir + "/per_label.csv",
                 [&](std::ostream& out) { exports::write_confusion_csv(table, out); });
    write_atomic(a.out_dir + "/report.json",
                 [&](std::ostream& out) { out << j.dump(2) << '\n'; });
    std::cout << "micro_f1=" << report.micro_prf.f1 << " macro_f1=" << report.macro_prf.f1
              << " acc@1=" << report.acc1 << '\n';
}

struct CompareArgs {
    std::string a_path, b_path, out_dir;
    std::string bands = "0.2,0.8";
    std::string alternative = "greater";
    std::string zero_method = "discard";
};

void cmd_compare(const CompareArgs& a) {
    auto run_a = evaluation::read_predictions_jsonl(a.a_path);
    auto run_b = evaluation::read_predictions_jsonl(a.b_path);
    auto [lower, upper] = parse_pair(a.bands, "--bands");
    stats::Alternative alt;
    if (a.alternative == "greater") alt = stats::Alternative::Greater;
    else if (a.alternative == "less") alt = stats::Alternative::Less;
    else if (a.alternative == "two_sided") alt = stats::Alternative::TwoSided;
    else throw ConfigError("--alternative: expected greater|less|two_sided");
    stats::ZeroMethod zm;
    if (a.zero_method == "discard") zm = stats::ZeroMethod::Discard;
    else if (a.zero_method == "pratt") zm = stats::ZeroMethod::Pratt;
    else throw ConfigError("--zero-method: expected discard|pratt");

    auto report = evaluation::compare_runs(run_a, run_b, lower, upper, alt, zm);
    nlohmann::json j;
    j["bands"] = nlohmann::json::array();
    for (const auto& band : report.bands) {
        nlohmann::json bj;
        bj["band"] = stats::band_name(band.band);
        bj["label_count"] = band.label_count;
        bj["mean_f1_a"] = band.mean_f1_a;
        bj["mean_f1_b"] = band.mean_f1_b;
        bj["wilcoxon"] =
            band.test ? exports::wilcoxon_json(*band.test) : nlohmann::json(nullptr);
        j["bands"].push_back(bj);
    }
    write_atomic(a.out_dir + "/compare.json",
                 [&](std::ostream& out) { out << j.dump(2) << '\n'; });
    write_atomic(a.out_dir + "/deltas.csv",
                 [&](std::ostream& out) { exports::write_delta_csv(report.deltas, out); });
    std::cout << "wrote " << a.out_dir << "/compare.json and deltas.csv\n";
}

struct BootstrapArgs {
    std::string predictions, metric = "micro", out;
    std::size_t b = 1000;
    std::uint64_t seed = 0;
    std::string levels = "0.025,0.975";
};

void cmd_bootstrap(const BootstrapArgs& a) {
    auto rows = evaluation::read_predictions_jsonl(a.predictions);
    auto table = metrics::confusion(evaluation::to_metric_records(rows), taxonomy::Level::Subclass);
    stats::BootstrapMetric metric;
    if (a.metric == "micro") metric = stats::BootstrapMetric::MicroF1;
    else if (a.metric == "macro") metric = stats::BootstrapMetric::MacroF1;
    else throw ConfigError("--metric: expected micro|macro");
    auto result = stats::bootstrap_ci(table, metric, a.b, a.seed, parse_pair(a.levels, "--levels"));
    auto j = exports::bootstrap_json(result);
    write_atomic(a.out, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
    std::cout << j.dump() << '\n';
}

struct CostsArgs {
    std::string costs_path, metrics_path, out_dir;
    double reference = -1.0;  // <0: use the best micro-F1 in the table
};

void cmd_costs(const CostsArgs& a) {
    std::vector<std::string> warnings;
    auto records = costs::load_costs(a.costs_path, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';

    std::ifstream in(a.metrics_path);
    if (!in) throw ParseError("cannot open metrics file: " + a.metrics_path);
    nlohmann::json mj;
    try {
        in >> mj;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(a.metrics_path + ": " + e.what());
    }
    std::map<std::string, double> f1;
    for (auto it = mj.begin(); it != mj.end(); ++it) f1[it.key()] = it.value().get<double>();

    auto table = costs::tradeoff_table(f1, records);
    double reference = a.reference;
    if (reference < 0.0)
        for (const auto& r : table.rows) reference = std::max(reference, r.micro_f1);
    write_atomic(a.out_dir + "/tradeoff.csv",
                 [&](std::ostream& out) { exports::write_tradeoff_csv(table, out); });
    auto plot = exports::tradeoff_plot_json(table, reference);
    write_atomic(a.out_dir + "/plot.json",
                 [&](std::ostream& out) { out << plot.dump(2) << '\n'; });
    for (const auto& k : table.unmatched_metrics)
        std::cerr << "warning: metric key without costs: " << k << '\n';
    for (const auto& k : table.unmatched_costs)
        std::cerr << "warning: cost row without metrics: " << k << '\n';
    std::cout << "wrote " << table.rows.size() << " tradeoff rows to " << a.out_dir << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"patentcls: CPC patent classification experiment harness"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Config file; command-line flags override its values");
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--jobs", jobs, "Worker count (results are independent of this)")
        ->capture_default_str();

    StatsArgs stats_args;
    auto* stats = app.add_subcommand("stats", "Corpus label-frequency report");
    stats->add_option("--corpus", stats_args.corpus_path, "Corpus file")->required();
    stats->add_option("--schema", stats_args.schema, "jsonl|csv")->capture_default_str();
    stats->add_option("--out", stats_args.out_dir, "Output directory")->required();
    stats->add_option("--format", stats_args.format, "csv|json stdout summary")
        ->capture_default_str();
    stats->callback([&] { cmd_stats(stats_args); });

    RetrieveArgs retrieve_args;
    auto* retrieve = app.add_subcommand("retrieve", "Top-K allowed label sets from embeddings");
    retrieve->add_option("--embeddings", retrieve_args.embeddings, "CPC embedding JSONL")
        ->required();
    retrieve->add_option("--queries", retrieve_args.queries, "Query vector JSONL")->required();
    retrieve->add_option("--k", retrieve_args.k, "Allowed-set size")->capture_default_str();
    retrieve->add_option("--out", retrieve_args.out, "Allowed-sets JSONL output")->required();
    retrieve->callback([&] { cmd_retrieve(retrieve_args); });

    PromptArgs prompt_args;
    auto* prompt = app.add_subcommand("prompt", "Render prompts for a regime");
    prompt->add_option("--test", prompt_args.test_path, "Test corpus")->required();
    prompt->add_option("--schema", prompt_args.schema, "jsonl|csv")->capture_default_str();
    prompt->add_option("--regime", prompt_args.regime,
                       "zero_shot|few_shot|zero_shot_rag|few_shot_rag")
        ->required();
    prompt->add_option("--train", prompt_args.train_path, "Training corpus (few-shot regimes)");
    prompt->add_option("--allowed", prompt_args.allowed_path, "Allowed-sets JSONL (RAG regimes)");
    prompt->add_option("--defs", prompt_args.defs_path, "Subclass definition TSV (RAG regimes)");
    prompt->add_option("--static-indices", prompt_args.static_indices,
                       "Static few-shot training row indices")
        ->capture_default_str();
    prompt->add_option("--dynamic-count", prompt_args.dynamic_count,
                       "Dynamically retrieved few-shot examples")
        ->capture_default_str();
    prompt->add_option("--out", prompt_args.out, "Prompt JSONL output")->required();
    prompt->callback([&] { cmd_prompt(prompt_args); });

    ParseArgs parse_args;
    auto* parse = app.add_subcommand("parse", "Parse raw generations into predictions");
    parse->add_option("--raw", parse_args.raw, "Generations JSONL {id, raw_output}")->required();
    parse->add_option("--allowed", parse_args.allowed_path, "Allowed-sets JSONL filter");
    parse->add_option("--corpus", parse_args.corpus_path, "Corpus for gold labels and text");
    parse->add_option("--schema", parse_args.schema, "jsonl|csv")->capture_default_str();
    parse->add_flag("--nonempty", parse_args.nonempty, "Force a nonempty prediction");
    parse->add_option("--cap", parse_args.cap, "Max labels per patent")->capture_default_str();
    parse->add_option("--out", parse_args.out, "predictions.jsonl output")->required();
    parse->callback([&] { cmd_parse(parse_args); });

    DecodeArgs decode_args;
    auto* decode = app.add_subcommand("decode", "Threshold-decode an encoder probability matrix");
    decode->add_option("--probs", decode_args.probs, "Probability matrix")->required();
    decode->add_option("--schema", decode_args.schema, "csv|jsonl")->capture_default_str();
    decode->add_option("--corpus", decode_args.corpus_path, "Test corpus")->required();
    decode->add_option("--corpus-schema", decode_args.corpus_schema, "jsonl|csv")
        ->capture_default_str();
    decode->add_option("--threshold", decode_args.threshold, "Decision threshold")
        ->capture_default_str();
    decode->add_flag("--calibrate", decode_args.calibrate, "Calibrate threshold on a dev split");
    decode->add_option("--dev-probs", decode_args.dev_probs, "Dev probability matrix");
    decode->add_option("--dev-corpus", decode_args.dev_corpus, "Dev corpus with gold labels");
    decode->add_option("--grid-step", decode_args.grid_step, "Calibration grid step")
        ->capture_default_str();
    decode->add_option("--cap", decode_args.cap, "Max labels per patent")->capture_default_str();
    decode->add_option("--allowed", decode_args.allowed_path, "Allowed-sets JSONL mask");
    decode->add_option("--out", decode_args.out_dir, "Output directory")->required();
    decode->callback([&] { cmd_decode(decode_args); });

    EvaluateArgs evaluate_args;
    auto* evaluate = app.add_subcommand("evaluate", "Recompute metrics from predictions.jsonl");
    evaluate->add_option("--predictions", evaluate_args.predictions, "predictions.jsonl")
        ->required();
    evaluate->add_option("--bootstrap", evaluate_args.bootstrap_b,
                         "Bootstrap resamples for CIs (0 = skip)")
        ->capture_default_str();
    evaluate->add_option("--seed", evaluate_args.seed, "Bootstrap RNG seed")->capture_default_str();
    evaluate->add_option("--out", evaluate_args.out_dir, "Output directory")->required();
    evaluate->callback([&] { cmd_evaluate(evaluate_args); });

    CompareArgs compare_args;
    auto* compare = app.add_subcommand("compare", "Stratified Wilcoxon comparison of two runs");
    compare->add_option("--a", compare_args.a_path, "Run A predictions.jsonl")->required();
    compare->add_option("--b", compare_args.b_path, "Run B predictions.jsonl")->required();
    compare->add_option("--bands", compare_args.bands, "Rare,frequent support quantiles")
        ->capture_default_str();
    compare->add_option("--alternative", compare_args.alternative, "greater|less|two_sided")
        ->capture_default_str();
    compare->add_option("--zero-method", compare_args.zero_method, "discard|pratt")
        ->capture_default_str();
    compare->add_option("--out", compare_args.out_dir, "Output directory")->required();
    compare->callback([&] { cmd_compare(compare_args); });

    BootstrapArgs bootstrap_args;
    auto* bootstrap = app.add_subcommand("bootstrap", "Label-resampled bootstrap CI");
    bootstrap->add_option("--predictions", bootstrap_args.predictions, "predictions.jsonl")
        ->required();
    bootstrap->add_option("--metric", bootstrap_args.metric, "micro|macro")->capture_default_str();
    bootstrap->add_option("--b", bootstrap_args.b, "Resamples")->capture_default_str();
    bootstrap->add_option("--seed", bootstrap_args.seed, "RNG seed")->capture_default_str();
    bootstrap->add_option("--levels", bootstrap_args.levels, "CI quantile pair")
        ->capture_default_str();
    bootstrap->add_option("--out", bootstrap_args.out, "JSON output file")->required();
    bootstrap->callback([&] { cmd_bootstrap(bootstrap_args); });

    CostsArgs costs_args;
    auto* costs_cmd = app.add_subcommand("costs", "Accuracy/cost tradeoff table");
    costs_cmd->add_option("--costs", costs_args.costs_path, "Run cost CSV")->required();
    costs_cmd->add_option("--metrics", costs_args.metrics_path,
                          "JSON object {\"model|setting\": micro_f1}")
        ->required();
    costs_cmd->add_option("--reference", costs_args.reference,
                          "Reference micro-F1 for the plot (default: table best)");
    costs_cmd->add_option("--out", costs_args.out_dir, "Output directory")->required();
    costs_cmd->callback([&] { cmd_costs(costs_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitInput;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ConfigMismatch& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const GoldMismatch& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const AlignmentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DimensionMismatch& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const WrongStage& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const MissingComponent& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {  // parse/input errors and everything else domain-level
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return 0;
}
