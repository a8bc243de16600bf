#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "patentcls/costs.hpp"

using namespace patentcls;
using namespace patentcls::costs;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = std::string("/tmp/patentcls_costs_") + name;
    std::ofstream out(path);
    out << content;
    return path;
}

RunCostRecord inference(const std::string& setting, const std::string& model, double min,
                        double kwh, double kg, std::size_t n) {
    RunCostRecord r;
    r.stage = Stage::Inference;
    r.setting = setting;
    r.model = model;
    r.time_min = min;
    r.energy_kwh = kwh;
    r.co2_kg = kg;
    r.n_patents = n;
    return r;
}

const char* kHeader = "stage,setting,model,time_min,energy_kwh,co2_kg,n_patents\n";

}  // namespace

TEST_CASE("load_costs parses the documented CSV") {
    auto path = write_temp("ok.csv", std::string(kHeader) +
                                         "Inference,Zero-shot,Qwen,65,0.478,0.0019,10000\n"
                                         "Training,Fine-tune,BERT,120,0.5,0.002\n");
    auto records = load_costs(path);
    REQUIRE(records.size() == 2);
    CHECK(records[0].stage == Stage::Inference);
    CHECK(records[0].setting == "Zero-shot");
    CHECK(records[0].model == "Qwen");
    CHECK(records[0].time_min == 65.0);
    CHECK(records[0].energy_kwh == 0.478);
    REQUIRE(records[0].n_patents);
    CHECK(*records[0].n_patents == 10000);
    CHECK(records[0].key() == "Qwen|Zero-shot");
    CHECK(records[1].stage == Stage::Training);
    CHECK_FALSE(records[1].n_patents);
}

TEST_CASE("load_costs validation") {
    auto neg = write_temp("neg.csv",
                          std::string(kHeader) + "Inference,Zero-shot,Qwen,65,-0.1,0.001,100\n");
    CHECK_THROWS_AS(load_costs(neg), NegativeQuantity);
    auto badn = write_temp("badn.csv",
                           std::string(kHeader) + "Inference,Zero-shot,Qwen,65,0.1,0.001,0\n");
    CHECK_THROWS_AS(load_costs(badn), NegativeQuantity);
    auto non = write_temp("non.csv", std::string(kHeader) + "Inference,Zero-shot,Qwen,65,0.1,0.001\n");
    CHECK_THROWS_AS(load_costs(non), ParseError);
    auto stage = write_temp("stage.csv", std::string(kHeader) + "Eval,Zero-shot,Qwen,65,0.1,0.001,10\n");
    CHECK_THROWS_AS(load_costs(stage), ParseError);
    auto numeric = write_temp("num.csv", std::string(kHeader) + "Inference,Z,Q,abc,0.1,0.001,10\n");
    CHECK_THROWS_AS(load_costs(numeric), ParseError);

    // Training row carrying an N: accepted, N ignored, warning emitted
    auto train_n = write_temp("trainn.csv",
                              std::string(kHeader) + "Training,Fine-tune,BERT,120,0.5,0.002,10000\n");
    std::vector<std::string> warnings;
    auto records = load_costs(train_n, &warnings);
    REQUIRE(records.size() == 1);
    CHECK_FALSE(records[0].n_patents);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("n_patents ignored") != std::string::npos);
}

TEST_CASE("per_patent division") {
    // 65 min over 10000 patents -> 0.39 s; 0.478 kWh -> 0.0478 Wh
    auto qwen = inference("Zero-shot", "Qwen", 65, 0.478, 0.0019, 10000);
    auto pp = per_patent(qwen);
    CHECK(pp.seconds == Catch::Approx(0.39));
    CHECK(pp.wh == Catch::Approx(0.0478));
    CHECK(pp.grams == Catch::Approx(1.9e-4));

    // 0.010 kWh over 10000 -> 1.0e-3 Wh
    auto bert = inference("Encoder", "BERT", 4, 0.010, 0.004, 10000);
    CHECK(per_patent(bert).wh == Catch::Approx(1.0e-3));

    // N = 1: totals converted to display units
    auto single = inference("Z", "M", 2, 0.5, 0.25, 1);
    auto one = per_patent(single);
    CHECK(one.seconds == 120.0);
    CHECK(one.wh == 500.0);
    CHECK(one.grams == 250.0);
}

TEST_CASE("per_patent times N recovers the totals") {
    auto r = inference("Few-shot + RAG", "Llama", 123.5, 0.7117, 0.00293, 9973);
    auto pp = per_patent(r);
    double n = static_cast<double>(*r.n_patents);
    CHECK(pp.seconds * n / 60.0 == Catch::Approx(r.time_min).epsilon(1e-12));
    CHECK(pp.wh * n / 1000.0 == Catch::Approx(r.energy_kwh).epsilon(1e-12));
    CHECK(pp.grams * n / 1000.0 == Catch::Approx(r.co2_kg).epsilon(1e-12));
}

TEST_CASE("per_patent stage guards") {
    RunCostRecord train;
    train.stage = Stage::Training;
    CHECK_THROWS_AS(per_patent(train), WrongStage);
    RunCostRecord no_n = inference("Z", "M", 1, 1, 1, 1);
    no_n.n_patents.reset();
    CHECK_THROWS_AS(per_patent(no_n), WrongStage);
}

TEST_CASE("tradeoff_table inner join, sort, unmatched reporting") {
    std::map<std::string, double> f1{{"Qwen|Zero-shot", 0.35},
                                     {"BERT|Encoder", 0.439},
                                     {"Llama|Few-shot", 0.31}};
    std::vector<RunCostRecord> costs = {
        inference("Zero-shot", "Qwen", 65, 0.478, 0.0019, 10000),
        inference("Encoder", "BERT", 4, 0.010, 0.004, 10000),
        inference("Zero-shot", "Mistral", 70, 0.5, 0.002, 10000),  // no metric
    };
    auto table = tradeoff_table(f1, costs);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].key == "BERT|Encoder");  // descending micro-F1
    CHECK(table.rows[0].micro_f1 == 0.439);
    CHECK(table.rows[0].energy_kwh == 0.010);
    CHECK(table.rows[0].per_patent_costs.wh == Catch::Approx(1.0e-3));
    CHECK(table.rows[1].key == "Qwen|Zero-shot");
    CHECK(table.unmatched_metrics == std::vector<std::string>{"Llama|Few-shot"});
    CHECK(table.unmatched_costs == std::vector<std::string>{"Mistral|Zero-shot"});
    CHECK(table.rows.size() <= std::min(f1.size(), costs.size()));
}

TEST_CASE("tradeoff_table skips training records and rejects duplicates") {
    std::map<std::string, double> f1{{"BERT|Encoder", 0.4}};
    std::vector<RunCostRecord> costs = {inference("Encoder", "BERT", 4, 0.01, 0.004, 100)};
    RunCostRecord train;
    train.stage = Stage::Training;
    train.setting = "Encoder";
    train.model = "BERT";
    costs.push_back(train);  // same key but Training: ignored, no DuplicateKey
    CHECK(tradeoff_table(f1, costs).rows.size() == 1);

    costs.push_back(inference("Encoder", "BERT", 5, 0.02, 0.008, 100));
    CHECK_THROWS_AS(tradeoff_table(f1, costs), DuplicateKey);
}

TEST_CASE("display_sig rounds for display only") {
    CHECK(display_sig(0.39) == "0.39");
    CHECK(display_sig(0.0478) == "0.0478");
    CHECK(display_sig(1.0e-3) == "0.001");
    CHECK(display_sig(0.4786, 2) == "0.48");
    double stored = 0.4786123456789;
    (void)display_sig(stored);
    CHECK(stored == 0.4786123456789);
}
