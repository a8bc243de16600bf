#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>

#include "patentcls/decoding.hpp"

using namespace patentcls;
using namespace patentcls::decoding;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = std::string("/tmp/patentcls_dec_") + name;
    std::ofstream out(path);
    out << content;
    return path;
}

ProbabilityMatrix matrix(std::vector<std::string> ids, std::vector<std::string> codes,
                         std::vector<std::vector<double>> probs) {
    return {std::move(ids), std::move(codes), std::move(probs)};
}

// Reference decode: collect (code, prob) pairs naively, apply mask / strict
// threshold / cap / fallback by explicit selection instead of one sorted pass.
std::vector<std::string> ref_decode(const ProbabilityMatrix& m, std::size_t row,
                                    const DecoderConfig& cfg) {
    const std::set<std::string>* allowed = nullptr;
    if (cfg.mask) {
        auto it = cfg.mask->find(m.ids[row]);
        if (it != cfg.mask->end()) allowed = &it->second;
    }
    std::vector<std::pair<std::string, double>> pool;
    for (std::size_t c = 0; c < m.cols(); ++c)
        if (!allowed || allowed->count(m.codes[c])) pool.emplace_back(m.codes[c], m.probs[row][c]);

    std::vector<std::pair<std::string, double>> over;
    for (const auto& p : pool)
        if (p.second > cfg.threshold) over.push_back(p);
    if (over.empty()) {
        // argmax among admissible, smallest code on ties
        auto best = pool.front();
        for (const auto& p : pool)
            if (p.second > best.second || (p.second == best.second && p.first < best.first))
                best = p;
        return {best.first};
    }
    // keep the cap highest-probability labels, then emit by descending prob,
    // ties lexicographic
    std::sort(over.begin(), over.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (over.size() > cfg.cap) over.resize(cfg.cap);
    std::vector<std::string> out;
    for (const auto& [c, _] : over) out.push_back(c);
    return out;
}

double micro_f1_of(const ProbabilityMatrix& m,
                   const std::map<std::string, std::set<std::string>>& gold, double tau,
                   std::size_t cap) {
    DecoderConfig cfg;
    cfg.threshold = tau;
    cfg.cap = cap;
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto pred = ref_decode(m, r, cfg);
        const auto& g = gold.at(m.ids[r]);
        for (const auto& p : pred)
            g.count(p) ? ++tp : ++fp;
        for (const auto& y : g)
            if (std::find(pred.begin(), pred.end(), y) == pred.end()) ++fn;
    }
    if (tp == 0) return 0.0;
    double prec = double(tp) / double(tp + fp), rec = double(tp) / double(tp + fn);
    return 2 * prec * rec / (prec + rec);
}

}  // namespace

TEST_CASE("load_probability_matrix csv and jsonl") {
    auto csv = write_temp("m.csv",
                          "id,G06F,h04l\n"
                          "p1,0.9,0.1\n"
                          "p2,0.2,0.8\n");
    auto m = load_probability_matrix(csv, "csv");
    REQUIRE(m.rows() == 2);
    CHECK(m.codes == std::vector<std::string>{"G06F", "H04L"});
    CHECK(m.probs[1][1] == Catch::Approx(0.8));

    auto jl = write_temp("m.jsonl",
                         R"({"id":"p1","probs":{"G06F":0.9,"H04L":0.1}})"
                         "\n"
                         R"({"id":"p2","probs":{"H04L":0.8}})"
                         "\n");
    auto mj = load_probability_matrix(jl, "jsonl");
    REQUIRE(mj.rows() == 2);
    CHECK(mj.codes == std::vector<std::string>{"G06F", "H04L"});
    CHECK(mj.probs[1][0] == 0.0);  // absent entries are zero
    CHECK(mj.probs[1][1] == Catch::Approx(0.8));

    auto bad = write_temp("bad.csv", "id,G06F\np1,1.5\n");
    CHECK_THROWS_AS(load_probability_matrix(bad, "csv"), ParseError);
    auto empty = write_temp("empty.csv", "id,G06F\n");
    CHECK_THROWS_AS(load_probability_matrix(empty, "csv"), ParseError);
    CHECK_THROWS_AS(load_probability_matrix(csv, "parquet"), ConfigError);
}

TEST_CASE("decode_row: strict threshold, ordering, ties") {
    auto m = matrix({"p1"}, {"A01B", "G06F", "H04L", "Y02D"}, {{0.5, 0.9, 0.9, 0.2}});
    DecoderConfig cfg;
    cfg.threshold = 0.5;
    // 0.5 is NOT strictly above 0.5; the two 0.9s tie and order lexicographically
    CHECK(decode_row(m, 0, cfg) == std::vector<std::string>{"G06F", "H04L"});
    cfg.threshold = 0.1;
    CHECK(decode_row(m, 0, cfg) == std::vector<std::string>{"G06F", "H04L", "A01B", "Y02D"});
}

TEST_CASE("decode_row: argmax fallback when nothing clears the threshold") {
    auto m = matrix({"p1"}, {"G06F", "H04L", "A01B"}, {{0.3, 0.3, 0.1}});
    DecoderConfig cfg;
    cfg.threshold = 0.9;
    // fallback to the single best label; tie at 0.3 broken lexicographically
    CHECK(decode_row(m, 0, cfg) == std::vector<std::string>{"G06F"});
}

TEST_CASE("decode_row: cap keeps the highest-probability labels") {
    auto m = matrix({"p1"}, {"A01B", "B60K", "C12L", "G06F"}, {{0.6, 0.7, 0.8, 0.9}});
    DecoderConfig cfg;
    cfg.threshold = 0.5;
    cfg.cap = 2;
    CHECK(decode_row(m, 0, cfg) == std::vector<std::string>{"G06F", "C12L"});
}

TEST_CASE("mask applies before both threshold and fallback") {
    auto m = matrix({"p1"}, {"A01B", "G06F", "H04L"}, {{0.95, 0.4, 0.3}});
    DecoderConfig cfg;
    cfg.threshold = 0.5;
    cfg.mask = std::map<std::string, std::set<std::string>>{{"p1", {"G06F", "H04L"}}};
    // A01B clears the threshold but is masked out; fallback argmax runs over
    // the masked pool only
    CHECK(decode_row(m, 0, cfg) == std::vector<std::string>{"G06F"});

    // rows without a mask entry decode unconstrained
    auto m2 = matrix({"p1", "p2"}, {"A01B", "G06F"}, {{0.9, 0.1}, {0.9, 0.1}});
    cfg.mask = std::map<std::string, std::set<std::string>>{{"p1", {"G06F"}}};
    auto decoded = decode(m2, cfg);
    CHECK(decoded.at("p1") == std::vector<std::string>{"G06F"});
    CHECK(decoded.at("p2") == std::vector<std::string>{"A01B"});
}

TEST_CASE("decode validates masks against the label space") {
    auto m = matrix({"p1"}, {"G06F"}, {{0.9}});
    DecoderConfig cfg;
    cfg.mask = std::map<std::string, std::set<std::string>>{{"p1", {"H04L"}}};
    CHECK_THROWS_AS(decode(m, cfg), AlignmentError);
    cfg.mask.reset();
    cfg.cap = 0;
    CHECK_THROWS_AS(decode(m, cfg), ConfigError);
}

TEST_CASE("decode matches the reference implementation on random matrices") {
    std::mt19937 rng(20240819);
    const std::vector<std::string> codes = {"A01B", "B60K", "C12L", "G06F",
                                            "H04L", "Y02D", "G06K", "H04N"};
    std::uniform_real_distribution<double> prob(0.0, 1.0);
    std::uniform_int_distribution<int> coin(0, 1);
    // quantize to a small set of values so ties actually occur
    auto q = [&](double p) { return std::round(p * 8.0) / 8.0; };
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t n = 1 + trial % 10;
        ProbabilityMatrix m;
        m.codes = codes;
        for (std::size_t r = 0; r < n; ++r) {
            m.ids.push_back("p" + std::to_string(r));
            std::vector<double> row;
            for (std::size_t c = 0; c < codes.size(); ++c) row.push_back(q(prob(rng)));
            m.probs.push_back(std::move(row));
        }
        DecoderConfig cfg;
        cfg.threshold = q(prob(rng));
        cfg.cap = 1 + trial % 7;
        if (coin(rng)) {
            std::map<std::string, std::set<std::string>> mask;
            for (std::size_t r = 0; r < n; ++r) {
                if (!coin(rng)) continue;
                std::set<std::string> allowed;
                while (allowed.size() < 3)
                    allowed.insert(codes[std::uniform_int_distribution<std::size_t>(
                        0, codes.size() - 1)(rng)]);
                mask[m.ids[r]] = allowed;
            }
            if (!mask.empty()) cfg.mask = std::move(mask);
        }
        auto got = decode(m, cfg);
        for (std::size_t r = 0; r < n; ++r) {
            INFO("trial " << trial << " row " << r);
            CHECK(got.at(m.ids[r]) == ref_decode(m, r, cfg));
        }
    }
}

TEST_CASE("calibrate_threshold matches an exhaustive grid sweep") {
    std::mt19937 rng(31337);
    std::uniform_real_distribution<double> prob(0.0, 1.0);
    std::uniform_int_distribution<int> coin(0, 1);
    const std::vector<std::string> codes = {"A01B", "G06F", "H04L", "Y02D"};
    for (int trial = 0; trial < 8; ++trial) {
        ProbabilityMatrix m;
        m.codes = codes;
        std::map<std::string, std::set<std::string>> gold;
        for (int r = 0; r < 6; ++r) {
            std::string id = "p" + std::to_string(r);
            m.ids.push_back(id);
            std::vector<double> row;
            for (std::size_t c = 0; c < codes.size(); ++c) row.push_back(prob(rng));
            m.probs.push_back(std::move(row));
            std::set<std::string> g;
            for (const auto& c : codes)
                if (coin(rng)) g.insert(c);
            if (g.empty()) g.insert(codes[0]);
            gold[id] = g;
        }
        const double step = 0.05;
        double got = calibrate_threshold(m, gold, step);
        double best_tau = 0.0, best_f1 = -1.0;
        for (int s = 0;; ++s) {
            double tau = std::min(1.0, s * step);
            double f1 = micro_f1_of(m, gold, tau, 7);
            if (f1 > best_f1) {
                best_f1 = f1;
                best_tau = tau;
            }
            if (tau >= 1.0) break;
        }
        INFO("trial " << trial);
        CHECK(got == Catch::Approx(best_tau));
        CHECK(micro_f1_of(m, gold, got, 7) == Catch::Approx(best_f1));
    }
}

TEST_CASE("calibrate_threshold on a perfectly separable matrix") {
    // probabilities exactly 0/1 and correct: with strict `p > tau` decoding the
    // F1 is already 1 at tau = 0, so the smaller-tie rule returns 0
    auto m = matrix({"p1", "p2"}, {"G06F", "H04L"}, {{1.0, 0.0}, {0.0, 1.0}});
    std::map<std::string, std::set<std::string>> gold{{"p1", {"G06F"}}, {"p2", {"H04L"}}};
    CHECK(calibrate_threshold(m, gold, 0.005) == 0.0);
}

TEST_CASE("calibrate_threshold flat-0.5 matrix stays at or below 0.5") {
    auto m = matrix({"p1", "p2"}, {"G06F", "H04L"}, {{0.5, 0.5}, {0.5, 0.5}});
    std::map<std::string, std::set<std::string>> gold{{"p1", {"G06F", "H04L"}},
                                                      {"p2", {"G06F"}}};
    double tau = calibrate_threshold(m, gold, 0.005);
    CHECK(tau <= 0.5);
    // below 0.5 everything is predicted: tp=3 fp=1 -> F1 = 6/7, beats the
    // argmax fallback above 0.5
    CHECK(micro_f1_of(m, gold, tau, 7) == Catch::Approx(6.0 / 7.0));
}

TEST_CASE("calibrate_threshold validates inputs") {
    auto m = matrix({"p1"}, {"G06F"}, {{0.9}});
    std::map<std::string, std::set<std::string>> gold{{"other", {"G06F"}}};
    CHECK_THROWS_AS(calibrate_threshold(m, gold), AlignmentError);
    std::map<std::string, std::set<std::string>> ok{{"p1", {"G06F"}}};
    CHECK_THROWS_AS(calibrate_threshold(m, ok, 0.0), ConfigError);
    CHECK_THROWS_AS(calibrate_threshold(m, ok, 0.7), ConfigError);
}
