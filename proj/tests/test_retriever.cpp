#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "autonoc/retriever.hpp"

using namespace autonoc;
using namespace autonoc::retriever;

namespace {

std::vector<Doc> toy_corpus() {
    return {
        {"amps", "# Amplifier basics\ngain and noise figure define the amplifier.\n"
                 "# Monitors\nmonitors read total power in dBm at input and output.\n"},
        {"fiber", "preamble about glass.\n# Attenuation\nfiber loss grows with length; "
                  "aging adds extra attenuation per span.\n"},
        {"traffic", "# Demands\nallreduce traffic forms a ring of equal demands.\n"},
    };
}

// Independent scorer: retokenizes from the raw docs, no Index reuse.
double oracle_score(const std::vector<std::string>& query, const Chunk& chunk,
                    const Index& index) {
    double score = 0.0;
    for (const auto& t : query) {
        int tf = 0;
        for (const auto& tok : tokenize(chunk.heading + " " + chunk.body))
            if (tok == t) ++tf;
        if (tf == 0) continue;
        int df = 0;
        for (const auto& c : index.chunks)
            if (c.tf.count(t)) ++df;
        score += tf * std::log(1.0 + double(index.chunk_count()) / df);
    }
    return score;
}

} // namespace

TEST_CASE("chunking at markdown headings") {
    auto index = ingest_corpus(toy_corpus());
    REQUIRE(index.chunk_count() == 5);
    CHECK(index.chunks[0].doc_id == "amps");
    CHECK(index.chunks[0].heading == "Amplifier basics");
    CHECK(index.chunks[1].heading == "Monitors");
    // Preamble text before the first heading is its own chunk.
    CHECK(index.chunks[2].doc_id == "fiber");
    CHECK(index.chunks[2].heading.empty());
    CHECK(index.chunks[2].body == "preamble about glass.");

    // A heading directly followed by another heading yields no chunk.
    auto sparse = ingest_corpus({{"d", "# Empty\n# Full\nsome text\n"}});
    REQUIRE(sparse.chunk_count() == 1);
    CHECK(sparse.chunks[0].heading == "Full");
}

TEST_CASE("ingest is deterministic and rejects duplicate ids") {
    auto a = ingest_corpus(toy_corpus());
    auto b = ingest_corpus(toy_corpus());
    REQUIRE(a.chunk_count() == b.chunk_count());
    CHECK(a.df == b.df);
    for (int i = 0; i < a.chunk_count(); ++i) CHECK(a.chunks[i].tf == b.chunks[i].tf);

    CHECK_THROWS_AS(ingest_corpus({{"x", "a b"}, {"x", "c d"}}), IngestError);

    auto empty = ingest_corpus({});
    CHECK(empty.chunk_count() == 0);
    CHECK(retrieve(empty, "anything", 3).empty());
}

TEST_CASE("retrieve ranking") {
    auto index = ingest_corpus(toy_corpus());

    SUBCASE("a token unique to one chunk puts it at rank 1") {
        auto hits = retrieve(index, "allreduce", 3);
        REQUIRE(!hits.empty());
        CHECK(hits[0].chunk.doc_id == "traffic");
    }
    SUBCASE("tokens absent from the corpus return nothing") {
        CHECK(retrieve(index, "zebra quantum", 5).empty());
    }
    SUBCASE("ties break by doc_id then position") {
        auto tied = ingest_corpus({{"b", "# One\nwidget\n"},
                                   {"a", "# Two\nwidget\n"},
                                   {"c", "# Three\nwidget\n"}});
        auto hits = retrieve(tied, "widget", 1);
        REQUIRE(hits.size() == 1);
        CHECK(hits[0].chunk.doc_id == "a");
    }
    SUBCASE("results sorted non-increasing, each containing a query token") {
        auto hits = retrieve(index, "fiber attenuation monitors power", 10);
        REQUIRE(!hits.empty());
        for (size_t i = 1; i < hits.size(); ++i) CHECK(hits[i - 1].score >= hits[i].score);
        for (const auto& h : hits) {
            bool has = false;
            for (const auto& t : tokenize("fiber attenuation monitors power"))
                if (h.chunk.tf.count(t)) has = true;
            CHECK(has);
        }
    }
}

TEST_CASE("scores match the exhaustive oracle on randomized queries") {
    auto index = ingest_corpus(toy_corpus());
    std::vector<std::string> vocabulary;
    for (const auto& [t, n] : index.df) vocabulary.push_back(t);
    vocabulary.push_back("nonsense");

    std::mt19937_64 rng(7);
    std::uniform_int_distribution<size_t> pick(0, vocabulary.size() - 1);
    for (int trial = 0; trial < 200; ++trial) {
        std::string query;
        int len = 1 + int(rng() % 4);
        std::vector<std::string> tokens;
        for (int i = 0; i < len; ++i) {
            tokens.push_back(vocabulary[pick(rng)]);
            query += tokens.back() + " ";
        }
        auto hits = retrieve(index, query, index.chunk_count());
        for (const auto& h : hits) {
            CHECK(h.score == doctest::Approx(oracle_score(tokens, h.chunk, index)).epsilon(1e-12));
        }
    }
}

TEST_CASE("adding a document with no query tokens never changes the top hit") {
    auto docs = toy_corpus();
    auto before = retrieve(ingest_corpus(docs), "fiber aging attenuation", 1);
    docs.push_back({"irrelevant", "# Cafeteria\nlunch menu on thursdays.\n"});
    auto after = retrieve(ingest_corpus(docs), "fiber aging attenuation", 1);
    REQUIRE(!before.empty());
    REQUIRE(!after.empty());
    CHECK(before[0].chunk.doc_id == after[0].chunk.doc_id);
    CHECK(before[0].chunk.heading == after[0].chunk.heading);
}

TEST_CASE("shipped corpus answers the aging investigation query") {
    auto index = ingest_directory(std::string(AUTONOC_DATA_DIR) + "/corpus");
    std::set<std::string> docs;
    for (const auto& c : index.chunks) docs.insert(c.doc_id);
    CHECK(docs.size() == 6);

    auto hits = retrieve(index,
                         "uniform power drop at downstream monitors increased span "
                         "attenuation fiber aging",
                         3);
    REQUIRE(!hits.empty());
    CHECK(hits[0].chunk.doc_id == "fiber-aging-guide.md");
}
