#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <set>
#include <algorithm>

#include "helpers.hpp"
#include "loadcast/cluster.hpp"
#include "loadcast/synthetic.hpp"
#include "loadcast/rng.hpp"

using namespace loadcast;

namespace {

ProfileVector pv(const std::string& code, std::vector<double> head) {
    ProfileVector v;
    v.country_code = code;
    for (std::size_t i = 0; i < head.size() && i < v.components.size(); ++i) v.components[i] = head[i];
    return v;
}

// From-scratch Ward oracle: explicit member lists, centroids recomputed at
// every step, merge distance = 2 * increase in within-cluster sum of squares.
Dendrogram ward_oracle(const std::vector<ProfileVector>& vectors) {
    const int n = static_cast<int>(vectors.size());
    struct Cl {
        int id;
        std::vector<int> members;
    };
    std::vector<Cl> cls(n);
    for (int i = 0; i < n; ++i) cls[i] = {i, {i}};

    auto centroid = [&](const std::vector<int>& members) {
        std::array<double, 43> c{};
        for (int m : members)
            for (std::size_t k = 0; k < 43; ++k) c[k] += vectors[m].components[k];
        for (auto& x : c) x /= static_cast<double>(members.size());
        return c;
    };

    Dendrogram out;
    for (const auto& v : vectors) out.leaf_codes.push_back(v.country_code);
    for (int step = 0; step < n - 1; ++step) {
        int bi = -1, bj = -1, blo = 0, bhi = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cls.size(); ++i) {
            for (std::size_t j = i + 1; j < cls.size(); ++j) {
                auto ca = centroid(cls[i].members), cb = centroid(cls[j].members);
                double na = cls[i].members.size(), nb = cls[j].members.size();
                double d2 = 0;
                for (std::size_t k = 0; k < 43; ++k) {
                    double d = ca[k] - cb[k];
                    d2 += d * d;
                }
                double dist = 2.0 * (na * nb / (na + nb)) * d2;
                int lo = std::min(cls[i].id, cls[j].id), hi = std::max(cls[i].id, cls[j].id);
                if (dist < best || (dist == best && (lo < blo || (lo == blo && hi < bhi)))) {
                    best = dist;
                    bi = static_cast<int>(i);
                    bj = static_cast<int>(j);
                    blo = lo;
                    bhi = hi;
                }
            }
        }
        Cl merged;
        merged.id = n + step;
        merged.members = cls[bi].members;
        merged.members.insert(merged.members.end(), cls[bj].members.begin(), cls[bj].members.end());
        out.merges.push_back({blo, bhi, best, static_cast<int>(merged.members.size())});
        cls.erase(cls.begin() + bj);
        cls[bi] = std::move(merged);
    }
    return out;
}

}  // namespace

TEST_CASE("two singletons merge at their squared euclidean distance") {
    auto dg = ward_dendrogram({pv("AA", {0.0}), pv("AB", {3.0})});
    REQUIRE(dg.merges.size() == 1);
    REQUIRE(dg.merges[0].left == 0);
    REQUIRE(dg.merges[0].right == 1);
    REQUIRE(dg.merges[0].distance == Catch::Approx(9.0).epsilon(1e-15));
    REQUIRE(dg.merges[0].size == 2);
}

TEST_CASE("merge ids follow the linkage convention") {
    // 1-d points 0, 0.1, 10, 10.2: pairs merge first, then the two pairs.
    auto dg = ward_dendrogram(
        {pv("AA", {0.0}), pv("AB", {0.1}), pv("BA", {10.0}), pv("BB", {10.2})});
    REQUIRE(dg.merges.size() == 3);
    REQUIRE(dg.merges[0].left == 0);
    REQUIRE(dg.merges[0].right == 1);
    REQUIRE(dg.merges[1].left == 2);
    REQUIRE(dg.merges[1].right == 3);
    REQUIRE(dg.merges[2].left == 4);  // cluster from step 0
    REQUIRE(dg.merges[2].right == 5); // cluster from step 1
    REQUIRE(dg.merges[2].size == 4);
    // Ward distance for the final merge, via centroids at 0.05 and 10.1:
    // 2 * (2*2/4) * (10.05)^2
    REQUIRE(dg.merges[2].distance == Catch::Approx(2.0 * (10.05 * 10.05)).epsilon(1e-12));
}

TEST_CASE("exact ties break toward the smallest id pair") {
    auto dg = ward_dendrogram(
        {pv("AA", {1.0}), pv("AB", {1.0}), pv("AC", {1.0}), pv("AD", {1.0})});
    REQUIRE(dg.merges[0].left == 0);
    REQUIRE(dg.merges[0].right == 1);
    REQUIRE(dg.merges[0].distance == 0.0);
    REQUIRE(dg.merges[1].left == 2);
    REQUIRE(dg.merges[1].right == 3);
    REQUIRE(dg.merges[2].left == 4);
    REQUIRE(dg.merges[2].right == 5);
}

TEST_CASE("lance-williams matches the brute-force oracle on 100 random instances") {
    Rng rng(8128);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + static_cast<int>(rng.uniform_index(7));  // 2..8
        std::vector<ProfileVector> vectors;
        for (int i = 0; i < n; ++i) {
            ProfileVector v;
            v.country_code = synthetic_code(i);
            for (auto& c : v.components) c = rng.uniform01();
            vectors.push_back(v);
        }
        // occasionally plant an exact duplicate to exercise zero-distance ties
        if (n >= 3 && trial % 4 == 0) vectors[1].components = vectors[0].components;

        auto got = ward_dendrogram(vectors);
        auto expect = ward_oracle(vectors);
        REQUIRE(got.merges.size() == expect.merges.size());
        for (std::size_t s = 0; s < got.merges.size(); ++s) {
            INFO("trial " << trial << " step " << s);
            REQUIRE(got.merges[s].left == expect.merges[s].left);
            REQUIRE(got.merges[s].right == expect.merges[s].right);
            REQUIRE(got.merges[s].size == expect.merges[s].size);
            REQUIRE(got.merges[s].distance ==
                    Catch::Approx(expect.merges[s].distance).margin(1e-9).epsilon(1e-9));
        }
    }
}

TEST_CASE("merge distances are monotonically non-decreasing for ward") {
    Rng rng(515);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<ProfileVector> vectors;
        for (int i = 0; i < 8; ++i) {
            ProfileVector v;
            v.country_code = synthetic_code(i);
            for (auto& c : v.components) c = rng.uniform01();
            vectors.push_back(v);
        }
        auto dg = ward_dendrogram(vectors);
        for (std::size_t s = 1; s < dg.merges.size(); ++s)
            REQUIRE(dg.merges[s].distance >= dg.merges[s - 1].distance - 1e-12);
    }
}

TEST_CASE("ward_dendrogram validates its inputs") {
    REQUIRE_THROWS_AS(ward_dendrogram({pv("AA", {0.0})}), ConfigError);
    REQUIRE_THROWS_AS(ward_dendrogram({pv("AA", {0.0}), pv("AA", {1.0})}), ConfigError);
}

TEST_CASE("cut_clusters renumbers by ascending smallest member code") {
    // BA/BB sit left of AA/AB in space, but cluster ids follow codes
    auto dg = ward_dendrogram(
        {pv("BA", {0.0}), pv("BB", {0.1}), pv("AA", {10.0}), pv("AB", {10.1})});
    auto ca = cut_clusters(dg, 2);
    REQUIRE(ca.k == 2);
    REQUIRE(ca.cluster_of.at("AA") == 1);
    REQUIRE(ca.cluster_of.at("AB") == 1);
    REQUIRE(ca.cluster_of.at("BA") == 2);
    REQUIRE(ca.cluster_of.at("BB") == 2);
}

TEST_CASE("cut_clusters spans k=1 to k=n") {
    auto dg = ward_dendrogram(
        {pv("AA", {0.0}), pv("AB", {1.0}), pv("AC", {5.0}), pv("AD", {6.0})});
    auto all = cut_clusters(dg, 1);
    REQUIRE(all.cluster_of.at("AA") == 1);
    REQUIRE(all.cluster_of.at("AD") == 1);
    auto each = cut_clusters(dg, 4);
    REQUIRE(each.cluster_of.at("AA") == 1);
    REQUIRE(each.cluster_of.at("AB") == 2);
    REQUIRE(each.cluster_of.at("AC") == 3);
    REQUIRE(each.cluster_of.at("AD") == 4);
    REQUIRE_THROWS_AS(cut_clusters(dg, 0), ConfigError);
    REQUIRE_THROWS_AS(cut_clusters(dg, 5), ConfigError);
}

TEST_CASE("cut_clusters matches cluster counts for every k") {
    Rng rng(2718);
    std::vector<ProfileVector> vectors;
    for (int i = 0; i < 8; ++i) {
        ProfileVector v;
        v.country_code = synthetic_code(i);
        for (auto& c : v.components) c = rng.uniform01();
        vectors.push_back(v);
    }
    auto dg = ward_dendrogram(vectors);
    for (int k = 1; k <= 8; ++k) {
        auto ca = cut_clusters(dg, k);
        std::set<int> ids;
        for (const auto& [code, id] : ca.cluster_of) ids.insert(id);
        REQUIRE(static_cast<int>(ids.size()) == k);
        REQUIRE(*ids.begin() == 1);
        REQUIRE(*ids.rbegin() == k);
    }
}

TEST_CASE("assignment csv round-trips") {
    testutil::TempDir tmp;
    ClusterAssignment ca;
    ca.k = 2;
    ca.cluster_of = {{"AA", 1}, {"AB", 1}, {"BA", 2}};
    auto p = tmp.file("assignment.csv");
    write_assignment_csv(ca, p);
    auto back = read_assignment_csv(p);
    REQUIRE(back.k == 2);
    REQUIRE(back.cluster_of == ca.cluster_of);
}

TEST_CASE("reading a missing assignment names the cluster stage") {
    REQUIRE_THROWS_WITH(read_assignment_csv("/nonexistent/assignment.csv"),
                        Catch::Matchers::ContainsSubstring("cluster stage"));
}

TEST_CASE("dendrogram csv lists one row per merge") {
    testutil::TempDir tmp;
    auto dg = ward_dendrogram({pv("AA", {0.0}), pv("AB", {1.0}), pv("AC", {5.0})});
    auto p = tmp.file("dendrogram.csv");
    write_dendrogram_csv(dg, p);
    auto text = testutil::read_text(p);
    REQUIRE(text.find("step,left,right,distance,size") == 0);
    REQUIRE(std::count(text.begin(), text.end(), '\n') == 3);  // header + 2 merges
}
