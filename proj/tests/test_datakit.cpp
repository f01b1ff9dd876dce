// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "helpers.hpp"
#include "wiser/autodiff.hpp"
#include "wiser/data.hpp"

using namespace wiser;
using namespace wiser::data;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("wiser_test_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

double nan_() { return std::numeric_limits<double>::quiet_NaN(); }

} // namespace

TEST_CASE("expression TSV loading") {
    TempDir dir;

    SECTION("2x3 zeros") {
        write_file(dir.file("e.tsv"), "gA\tgB\tgC\ns1\t0\t0\t0\ns2\t0\t0\t0\n");
        auto m = load_expression(dir.file("e.tsv"), Domain::CellLine);
        CHECK(m.samples == 2);
        CHECK(m.genes == 3);
        for (double v : m.values) CHECK(v == 0.0);
        CHECK(m.sample_ids == std::vector<std::string>{"s1", "s2"});
    }

    SECTION("header-only file is rejected") {
        write_file(dir.file("h.tsv"), "gA\tgB\n");
        CHECK_THROWS_AS(load_expression(dir.file("h.tsv"), Domain::Patient), DataError);
    }

    SECTION("width mismatch reports the line number") {
        write_file(dir.file("w.tsv"), "gA\tgB\ns1\t1.0\t2.0\ns2\t1.0\n");
        CHECK_THROWS_WITH(load_expression(dir.file("w.tsv"), Domain::CellLine),
                          Catch::Matchers::ContainsSubstring(":3"));
    }

    SECTION("non-finite value is rejected") {
        write_file(dir.file("n.tsv"), "gA\ns1\tnan\n");
        CHECK_THROWS_AS(load_expression(dir.file("n.tsv"), Domain::CellLine), DataError);
    }

    SECTION("duplicate sample ids are rejected") {
        write_file(dir.file("d.tsv"), "gA\ns1\t1\ns1\t2\n");
        CHECK_THROWS_AS(load_expression(dir.file("d.tsv"), Domain::CellLine), DataError);
    }

    SECTION("save -> load round trip is bit exact") {
        Rng rng(17);
        ExpressionMatrix m;
        m.samples = 5;
        m.genes = 7;
        m.domain = Domain::Patient;
        m.values.resize(35);
        for (double& v : m.values) v = rng.normal() * std::pow(10.0, rng.uniform(-8, 8));
        for (std::size_t s = 0; s < m.samples; ++s) m.sample_ids.push_back("p" + std::to_string(s));
        for (std::size_t g = 0; g < m.genes; ++g) m.gene_names.push_back("g" + std::to_string(g));
        save_expression(dir.file("rt.tsv"), m);
        auto back = load_expression(dir.file("rt.tsv"), Domain::Patient);
        REQUIRE(back.values.size() == m.values.size());
        for (std::size_t i = 0; i < m.values.size(); ++i) CHECK(back.values[i] == m.values[i]);
    }
}

TEST_CASE("audrc z-score labeling") {
    auto table = [](std::vector<double> col) {
        ScoreTable t;
        t.samples = col.size();
        t.drugs = {"dX"};
        t.values = std::move(col);
        for (std::size_t i = 0; i < t.samples; ++i) t.sample_ids.push_back("s" + std::to_string(i));
        return t;
    };

    SECTION("symmetric column: z-signs map to labels, exact zero -> 0") {
        auto r = audrc_to_labels(table({1.0, 2.0, 3.0}));
        CHECK(r.at(0, 0) == 1);
        CHECK(r.at(1, 0) == 0); // z == 0 exactly
        CHECK(r.at(2, 0) == 0);
    }

    SECTION("missing entries stay -1") {
        auto r = audrc_to_labels(table({5.0, nan_(), 7.0}));
        CHECK(r.at(0, 0) == 1);
        CHECK(r.at(1, 0) == -1);
        CHECK(r.at(2, 0) == 0);
    }

    SECTION("random column matches an independent mean/std recomputation") {
        Rng rng(23);
        std::vector<double> col(40);
        for (auto& v : col) v = rng.uniform(-4.0, 9.0);
        col[3] = col[11] = nan_();
        auto r = audrc_to_labels(table(col));

        // oracle: recompute with a separate accumulation path
        std::vector<double> obs;
        for (double v : col)
            if (!std::isnan(v)) obs.push_back(v);
        double mu = 0.0;
        for (double v : obs) mu += v;
        mu /= double(obs.size());
        double var = 0.0;
        for (double v : obs) var += (v - mu) * (v - mu);
        var /= double(obs.size());
        const double sd = std::sqrt(var);
        for (std::size_t i = 0; i < col.size(); ++i) {
            const int expect = std::isnan(col[i]) ? -1 : ((col[i] - mu) / sd < 0.0 ? 1 : 0);
            CHECK(r.at(i, 0) == expect);
        }
    }

    SECTION("constant column names the drug") {
        CHECK_THROWS_WITH(audrc_to_labels(table({2.0, 2.0, 2.0})),
                          Catch::Matchers::ContainsSubstring("dX"));
    }

    SECTION("fewer than two observed scores is an error") {
        CHECK_THROWS_AS(audrc_to_labels(table({2.0, nan_(), nan_()})), DataError);
    }
}

TEST_CASE("relapse median labeling") {
    auto table = [](std::vector<double> col) {
        ScoreTable t;
        t.samples = col.size();
        t.drugs = {"dY"};
        t.values = std::move(col);
        for (std::size_t i = 0; i < t.samples; ++i) t.sample_ids.push_back("s" + std::to_string(i));
        return t;
    };

    SECTION("[1,2,3]: median tie maps to 0") {
        auto r = relapse_to_labels(table({1.0, 2.0, 3.0}));
        CHECK(r.at(0, 0) == 0);
        CHECK(r.at(1, 0) == 0);
        CHECK(r.at(2, 0) == 1);
    }

    SECTION("single observed value equals its own median -> 0") {
        auto r = relapse_to_labels(table({4.5, nan_()}));
        CHECK(r.at(0, 0) == 0);
        CHECK(r.at(1, 0) == -1);
    }

    SECTION("random values match a sort-based median oracle") {
        Rng rng(29);
        std::vector<double> col(25);
        for (auto& v : col) v = rng.uniform(0.0, 100.0);
        col[7] = nan_();
        auto r = relapse_to_labels(table(col));

        std::vector<double> obs;
        for (double v : col)
            if (!std::isnan(v)) obs.push_back(v);
        std::sort(obs.begin(), obs.end());
        const double med =
            obs.size() % 2 ? obs[obs.size() / 2]
                           : 0.5 * (obs[obs.size() / 2 - 1] + obs[obs.size() / 2]);
        for (std::size_t i = 0; i < col.size(); ++i) {
            const int expect = std::isnan(col[i]) ? -1 : (col[i] > med ? 1 : 0);
            CHECK(r.at(i, 0) == expect);
        }
    }
}

TEST_CASE("stratified k-fold") {
    SECTION("balanced 10 samples, k=5: one of each class per fold") {
        std::vector<int> labels = {1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
        auto split = stratified_kfold(labels, 5, 42);
        for (std::size_t f = 0; f < 5; ++f) {
            int pos = 0, neg = 0;
            for (std::size_t i = 0; i < labels.size(); ++i) {
                if (split.assignments[i] != f) continue;
                (labels[i] == 1 ? pos : neg)++;
            }
            CHECK(pos == 1);
            CHECK(neg == 1);
        }
    }

    SECTION("k=1 puts everything in one fold") {
        auto split = stratified_kfold({1, 0, 1, 0}, 1, 7);
        for (auto a : split.assignments) CHECK(a == 0);
    }

    SECTION("per-fold class counts stay within one of the proportional share") {
        Rng rng(55);
        for (int trial = 0; trial < 30; ++trial) {
            const std::size_t n = 10 + rng.index(60);
            std::vector<int> labels(n);
            std::size_t pos_total = 0;
            for (auto& l : labels) {
                l = rng.uniform() < 0.4 ? 1 : 0;
                pos_total += std::size_t(l);
            }
            if (pos_total == 0 || pos_total == n) continue;
            const std::size_t k = 1 + rng.index(std::min(pos_total, n - pos_total));
            auto split = stratified_kfold(labels, k, std::uint64_t(trial));

            std::vector<std::size_t> pos_count(k, 0), neg_count(k, 0);
            for (std::size_t i = 0; i < n; ++i) {
                REQUIRE(split.assignments[i] < k);
                (labels[i] == 1 ? pos_count : neg_count)[split.assignments[i]]++;
            }
            for (std::size_t f = 0; f < k; ++f) {
                CHECK(std::abs(double(pos_count[f]) - double(pos_total) / double(k)) < 1.0);
                CHECK(std::abs(double(neg_count[f]) - double(n - pos_total) / double(k)) < 1.0);
            }
        }
    }

    SECTION("k above the minority class count is rejected") {
        CHECK_THROWS_AS(stratified_kfold({1, 1, 1, 0}, 2, 1), ConfigError);
    }

    SECTION("deterministic given seed; fold-size profile invariant to label order") {
        std::vector<int> labels = {1, 0, 0, 1, 1, 0, 1, 0, 0, 0, 1};
        auto a = stratified_kfold(labels, 3, 9);
        auto b = stratified_kfold(labels, 3, 9);
        CHECK(a.assignments == b.assignments);

        std::vector<int> shuffled = labels;
        Rng rng(2);
        rng.shuffle(shuffled);
        auto c = stratified_kfold(shuffled, 3, 9);
        auto profile = [](const FoldSplit& s, const std::vector<int>& ls, std::size_t k) {
            std::multiset<std::pair<std::size_t, std::size_t>> prof;
            for (std::size_t f = 0; f < k; ++f) {
                std::size_t pos = 0, neg = 0;
                for (std::size_t i = 0; i < ls.size(); ++i)
                    if (s.assignments[i] == f) (ls[i] == 1 ? pos : neg)++;
                prof.insert({pos, neg});
            }
            return prof;
        };
        CHECK(profile(a, labels, 3) == profile(c, shuffled, 3));
    }
}

TEST_CASE("chunk partition") {
    SECTION("10 samples into 5 chunks of 2") {
        auto chunks = chunk_partition(10, 5, 3);
        REQUIRE(chunks.size() == 5);
        for (const auto& c : chunks) CHECK(c.size() == 2);
    }

    SECTION("single chunk holds everything") {
        auto chunks = chunk_partition(6, 1, 3);
        REQUIRE(chunks.size() == 1);
        CHECK(chunks[0] == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
    }

    SECTION("7 into 3: sizes {3,2,2} covering all indices") {
        auto chunks = chunk_partition(7, 3, 11);
        std::multiset<std::size_t> sizes;
        std::set<std::size_t> seen;
        for (const auto& c : chunks) {
            sizes.insert(c.size());
            seen.insert(c.begin(), c.end());
        }
        CHECK(sizes == std::multiset<std::size_t>{2, 2, 3});
        CHECK(seen.size() == 7);
    }

    SECTION("disjoint exhaustive cover for random sizes") {
        Rng rng(77);
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t n = 1 + rng.index(200);
            const std::size_t o = 1 + rng.index(n);
            auto chunks = chunk_partition(n, o, std::uint64_t(trial));
            std::set<std::size_t> seen;
            std::size_t total = 0, min_sz = n, max_sz = 0;
            for (const auto& c : chunks) {
                total += c.size();
                min_sz = std::min(min_sz, c.size());
                max_sz = std::max(max_sz, c.size());
                seen.insert(c.begin(), c.end());
            }
            CHECK(total == n);
            CHECK(seen.size() == n);
            CHECK(max_sz - min_sz <= 1);
        }
    }

    SECTION("more chunks than samples is rejected") {
        CHECK_THROWS_AS(chunk_partition(3, 4, 0), ConfigError);
    }
}

namespace {

// test-local pair-counting AUROC (independent of the library metric)
double pair_auroc(const std::vector<double>& score, const std::vector<int>& label) {
    double num = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < score.size(); ++i) {
        if (label[i] != 1) continue;
        for (std::size_t j = 0; j < score.size(); ++j) {
            if (label[j] != 0) continue;
            ++pairs;
            if (score[i] > score[j])
                num += 1.0;
            else if (score[i] == score[j])
                num += 0.5;
        }
    }
    return num / double(pairs);
}

} // namespace

TEST_CASE("synthetic two-domain generator") {
    SECTION("null shift and noise: per-gene means agree within 3 standard errors") {
        SynthConfig cfg;
        cfg.latent_dim = 6;
        cfg.genes = 40;
        cfg.n_cell = 400;
        cfg.n_patient = 400;
        cfg.n_drugs = 2;
        cfg.domain_shift_scale = 0.0;
        cfg.noise_scale = 0.0;
        cfg.seed = 81;
        auto d = synth_generate(cfg);

        int outside = 0;
        for (std::size_t g = 0; g < cfg.genes; ++g) {
            double mc = 0.0, mp = 0.0, vc = 0.0, vp = 0.0;
            for (std::size_t s = 0; s < cfg.n_cell; ++s) mc += d.cell.at(s, g);
            for (std::size_t s = 0; s < cfg.n_patient; ++s) mp += d.patient.at(s, g);
            mc /= double(cfg.n_cell);
            mp /= double(cfg.n_patient);
            for (std::size_t s = 0; s < cfg.n_cell; ++s)
                vc += (d.cell.at(s, g) - mc) * (d.cell.at(s, g) - mc);
            for (std::size_t s = 0; s < cfg.n_patient; ++s)
                vp += (d.patient.at(s, g) - mp) * (d.patient.at(s, g) - mp);
            vc /= double(cfg.n_cell - 1);
            vp /= double(cfg.n_patient - 1);
            const double se = std::sqrt(vc / double(cfg.n_cell) + vp / double(cfg.n_patient));
            if (std::abs(mc - mp) > 3.0 * se) ++outside;
        }
        // 3 sigma per gene; a stray excursion or two over 40 genes is chance
        CHECK(outside <= 2);
    }

    SECTION("one drug: single near-balanced column") {
        SynthConfig cfg;
        cfg.latent_dim = 4;
        cfg.genes = 10;
        cfg.n_cell = 31;
        cfg.n_patient = 10;
        cfg.n_drugs = 1;
        cfg.seed = 5;
        auto d = synth_generate(cfg);
        REQUIRE(d.cell_response.drugs.size() == 1);
        int pos = 0;
        for (std::size_t s = 0; s < cfg.n_cell; ++s) pos += d.cell_response.at(s, 0);
        CHECK(std::abs(2 * pos - int(cfg.n_cell)) <= 1);
    }

    SECTION("a linear probe on latent factors recovers its own labels") {
        SynthConfig cfg;
        cfg.latent_dim = 8;
        cfg.genes = 30;
        cfg.n_cell = 200;
        cfg.n_patient = 10;
        cfg.n_drugs = 3;
        cfg.seed = 13;
        auto d = synth_generate(cfg);

        for (std::size_t drug = 0; drug < cfg.n_drugs; ++drug) {
            // logistic probe on the latent factors, trained by gradient descent
            Tensor w(cfg.latent_dim, 1);
            Tensor labels(cfg.n_cell, 1);
            for (std::size_t s = 0; s < cfg.n_cell; ++s)
                labels.at(s, 0) = double(d.cell_response.at(s, drug));
            for (int iter = 0; iter < 300; ++iter) {
                ad::Tape tape;
                ad::Var vw = tape.leaf(w, true);
                ad::Var p = ad::sigmoid(ad::matmul(tape.constant(d.cell_latent), vw));
                ad::Var y = tape.constant(labels);
                ad::Var nll = ad::scalar_mul(
                    ad::mean(ad::add(ad::mul(y, ad::log(p)),
                                     ad::mul(ad::scalar_add(ad::scalar_mul(y, -1.0), 1.0),
                                             ad::log(ad::scalar_add(ad::scalar_mul(p, -1.0), 1.0))))),
                    -1.0);
                auto g = ad::gradients(nll, {vw});
                for (std::size_t i = 0; i < w.data.size(); ++i) w.data[i] -= 0.5 * g[0].data[i];
            }
            Tensor p = wiser::matmul(d.cell_latent, w);
            std::vector<double> scores(p.data.begin(), p.data.end());
            std::vector<int> ls(cfg.n_cell);
            for (std::size_t s = 0; s < cfg.n_cell; ++s) ls[s] = d.cell_response.at(s, drug);
            CHECK(pair_auroc(scores, ls) > 0.95);
        }
    }

    SECTION("invalid configs are rejected") {
        SynthConfig cfg;
        cfg.n_drugs = 0;
        CHECK_THROWS_AS(synth_generate(cfg), ConfigError);
        cfg.n_drugs = 2;
        cfg.noise_scale = -0.1;
        CHECK_THROWS_AS(synth_generate(cfg), ConfigError);
    }
}
