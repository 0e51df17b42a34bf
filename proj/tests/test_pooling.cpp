#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "saepipe/errors.hpp"
#include "saepipe/pooling.hpp"

#include "test_util.hpp"

#include <algorithm>
#include <random>

using namespace saepipe;

namespace {

ActivationStream stream_of(std::vector<SparseRow> rows, std::uint32_t m,
                           const std::string& id = "doc") {
    ActivationStream s;
    s.doc_id = id;
    s.date = Date::from_iso("2013-05-01");
    s.n_features = m;
    s.rows = std::move(rows);
    return s;
}

ActivationStream random_stream(std::mt19937& gen, std::uint32_t m, int max_tokens,
                               const std::string& id = "r") {
    std::uniform_real_distribution<float> value(0.0f, 4.0f);
    std::bernoulli_distribution active(0.5);
    std::vector<SparseRow> rows(gen() % (max_tokens + 1));
    for (auto& row : rows)
        for (std::uint32_t j = 0; j < m; ++j)
            if (active(gen)) row.push_back({j, value(gen)});
    return stream_of(std::move(rows), m, id);
}

} // namespace

TEST_CASE("sum_pool: documented two-row example") {
    // rows [1,0,2] and [0,3,1] over m=3
    const auto s = stream_of({{{0, 1.0f}, {2, 2.0f}}, {{1, 3.0f}, {2, 1.0f}}}, 3);
    const DocumentVector v = sum_pool(s);
    REQUIRE(v.values.size() == 3);
    CHECK(v.values[0] == 1.0);
    CHECK(v.values[1] == 3.0);
    CHECK(v.values[2] == 3.0);
    CHECK(v.doc_id == s.doc_id);
    CHECK(v.date == s.date);
    CHECK_FALSE(v.label.has_value());
}

TEST_CASE("sum_pool: no tokens pools to the zero vector") {
    const DocumentVector v = sum_pool(stream_of({}, 4));
    CHECK(v.values == std::vector<double>(4, 0.0));
}

TEST_CASE("sum_pool: the default cap truncates at 20000 tokens") {
    std::vector<SparseRow> rows(25000, SparseRow{{0, 1.0f}});
    const auto s = stream_of(std::move(rows), 1);
    CHECK(sum_pool(s).values[0] == 20000.0);
    CHECK(sum_pool(s, 25000).values[0] == 25000.0);
    CHECK(sum_pool(s, 3).values[0] == 3.0);
    CHECK(kDefaultTokenCap == 20000);
}

TEST_CASE("sum_pool: cap below or above n_tokens behaves as min") {
    const auto s = stream_of({{{0, 1.0f}}, {{0, 2.0f}}, {{0, 4.0f}}}, 1);
    CHECK(sum_pool(s, 1).values[0] == 1.0);
    CHECK(sum_pool(s, 2).values[0] == 3.0);
    CHECK(sum_pool(s, 999).values[0] == 7.0);
}

TEST_CASE("sum_pool: token_cap of zero is rejected") {
    const auto s = stream_of({{{0, 1.0f}}}, 1);
    CHECK_THROWS_AS((void)sum_pool(s, 0), value_error);
}

TEST_CASE("pooling additivity over concatenated token blocks") {
    std::mt19937 gen(17);
    for (int trial = 0; trial < 300; ++trial) {
        const std::uint32_t m = 1 + gen() % 6;
        const auto a = random_stream(gen, m, 5, "a");
        const auto b = random_stream(gen, m, 5, "b");
        auto both = a;
        both.rows.insert(both.rows.end(), b.rows.begin(), b.rows.end());
        const auto va = sum_pool(a), vb = sum_pool(b), vc = sum_pool(both);
        for (std::uint32_t j = 0; j < m; ++j)
            CHECK(vc.values[j] == doctest::Approx(va.values[j] + vb.values[j]).epsilon(1e-12));
    }
}

TEST_CASE("pooling is invariant to token order within the cap") {
    std::mt19937 gen(19);
    for (int trial = 0; trial < 300; ++trial) {
        const std::uint32_t m = 1 + gen() % 6;
        auto s = random_stream(gen, m, 8);
        const auto before = sum_pool(s);
        std::shuffle(s.rows.begin(), s.rows.end(), gen);
        const auto after = sum_pool(s);
        for (std::uint32_t j = 0; j < m; ++j)
            CHECK(after.values[j] == doctest::Approx(before.values[j]).epsilon(1e-12));
    }
}

TEST_CASE("pooled coordinates are non-decreasing in the cap") {
    std::mt19937 gen(23);
    const auto s = random_stream(gen, 5, 30);
    std::vector<double> prev(5, -1.0);
    for (std::size_t cap = 1; cap <= 32; ++cap) {
        const auto v = sum_pool(s, cap);
        for (std::uint32_t j = 0; j < 5; ++j) {
            CHECK(v.values[j] >= prev[j]);
            prev[j] = v.values[j];
        }
    }
}

TEST_CASE("64-bit accumulation does not drift like f32 would") {
    // 20000 additions of 0.1f: f32 accumulation drifts by ~1e-2.
    std::vector<SparseRow> rows(20000, SparseRow{{0, 0.1f}});
    const auto v = sum_pool(stream_of(std::move(rows), 1));
    const double expect = 20000.0 * static_cast<double>(0.1f);
    CHECK(v.values[0] == doctest::Approx(expect).epsilon(1e-12));

    float f32_sum = 0.0f;
    for (int i = 0; i < 20000; ++i) f32_sum += 0.1f;
    CHECK(std::abs(static_cast<double>(f32_sum) - expect) > 1e-3); // the drift being avoided
}

TEST_CASE("pool_corpus: order-preserving, width-checked") {
    CHECK(pool_corpus({}).empty());

    std::mt19937 gen(29);
    std::vector<ActivationStream> corpus;
    for (int i = 0; i < 3; ++i) corpus.push_back(random_stream(gen, 4, 5, "c" + std::to_string(i)));
    const auto docs = pool_corpus(corpus);
    REQUIRE(docs.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(docs[i].doc_id == "c" + std::to_string(i));

    corpus.push_back(random_stream(gen, 5, 5, "bad"));
    CHECK_THROWS_AS((void)pool_corpus(corpus), shape_error);
}

TEST_CASE("SAEP2 file: round-trip preserves values, dates and label states") {
    TempDir dir("saep2");
    std::mt19937 gen(31);
    std::vector<DocumentVector> in;
    for (int i = 0; i < 7; ++i) {
        DocumentVector d = sum_pool(random_stream(gen, 6, 5, "p" + std::to_string(i)));
        if (i % 3 == 0) d.label = 0;
        if (i % 3 == 1) d.label = 1;
        in.push_back(std::move(d));
    }
    write_pooled_file(in, dir.file("c.saep2"));
    const auto out = read_pooled_file(dir.file("c.saep2"));
    REQUIRE(out.size() == in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        CHECK(out[i].doc_id == in[i].doc_id);
        CHECK(out[i].date == in[i].date);
        CHECK(out[i].label == in[i].label);
        CHECK(out[i].values == in[i].values); // f64 payload is bit-exact
    }
}

TEST_CASE("SAEP2 file: bad magic, bad label byte, truncation") {
    TempDir dir("saep2_bad");
    std::vector<DocumentVector> docs{sum_pool(stream_of({{{0, 1.0f}}}, 2))};
    docs[0].label = 1;
    write_pooled_file(docs, dir.file("ok.saep2"));
    std::string bytes = slurp(dir.file("ok.saep2"));

    std::string wrong = bytes;
    wrong[0] = 'Q';
    spit(dir.file("magic.saep2"), wrong);
    CHECK_THROWS_AS((void)read_pooled_file(dir.file("magic.saep2")), format_error);

    std::string badlabel = bytes;
    badlabel.back() = 7; // label byte is the final byte of the single document
    spit(dir.file("label.saep2"), badlabel);
    CHECK_THROWS_AS((void)read_pooled_file(dir.file("label.saep2")), format_error);

    spit(dir.file("trunc.saep2"), bytes.substr(0, bytes.size() - 5));
    CHECK_THROWS_AS((void)read_pooled_file(dir.file("trunc.saep2")), corruption_error);
}

TEST_CASE("pool_file: streaming SAEF->SAEP2 equals in-memory pooling") {
    TempDir dir("poolfile");
    std::mt19937 gen(37);
    std::vector<ActivationStream> corpus;
    for (int i = 0; i < 6; ++i) corpus.push_back(random_stream(gen, 5, 9, "f" + std::to_string(i)));
    write_activation_file(corpus, dir.file("c.saef"));

    const PoolSummary s = pool_file(dir.file("c.saef"), dir.file("c.saep2"), 4);
    const auto streamed = read_pooled_file(dir.file("c.saep2"));
    const auto direct = pool_corpus(corpus, 4);
    REQUIRE(streamed.size() == direct.size());
    for (std::size_t i = 0; i < direct.size(); ++i) {
        CHECK(streamed[i].doc_id == direct[i].doc_id);
        CHECK(streamed[i].values == direct[i].values);
    }

    CHECK(s.doc_count == 6);
    CHECK(s.n_features == 5);
    std::uint64_t total = 0;
    std::uint32_t lo = corpus[0].n_tokens(), hi = corpus[0].n_tokens();
    for (const auto& c : corpus) {
        total += c.n_tokens();
        lo = std::min(lo, c.n_tokens());
        hi = std::max(hi, c.n_tokens());
    }
    CHECK(s.total_tokens == total);
    CHECK(s.min_tokens == lo);
    CHECK(s.max_tokens == hi);
    CHECK(s.mean_tokens == doctest::Approx(static_cast<double>(total) / 6.0));
}

TEST_CASE("corpus split across two files pools identically to one file") {
    TempDir dir("twofiles");
    std::mt19937 gen(41);
    std::vector<ActivationStream> all;
    for (int i = 0; i < 8; ++i) all.push_back(random_stream(gen, 4, 6, "x" + std::to_string(i)));
    const std::vector<ActivationStream> first(all.begin(), all.begin() + 3);
    const std::vector<ActivationStream> second(all.begin() + 3, all.end());

    write_activation_file(first, dir.file("1.saef"));
    write_activation_file(second, dir.file("2.saef"));
    auto part = pool_corpus(read_activation_file(dir.file("1.saef")));
    const auto more = pool_corpus(read_activation_file(dir.file("2.saef")));
    part.insert(part.end(), more.begin(), more.end());

    const auto whole = pool_corpus(all);
    REQUIRE(part.size() == whole.size());
    for (std::size_t i = 0; i < whole.size(); ++i) CHECK(part[i].values == whole[i].values);
}
