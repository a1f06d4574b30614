#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <random>

#include "ljt/contract.hpp"
#include "ljt/error.hpp"
#include "support.hpp"

using namespace ljt;
using boost::multiprecision::cpp_rational;
using test::kAlice;
using test::kBob;
using test::kCarol;
using test::kOwner;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no ljt::Error thrown";
    return ErrorCode::ParseError;
}

World fresh() {
    ContractParams p;
    p.owner = kOwner;
    return genesis_world(p);
}

bool oracle_improves(std::int64_t u, std::int64_t e, Ratio d) {
    const cpp_rational ue(u), ee(e), delta(cpp_rational(d.num) / cpp_rational(d.den));
    return ue < ee - delta * abs(ee);
}

}  // namespace

TEST(Genesis, LatticeEntries) {
    const auto w = fresh();
    ASSERT_EQ(w.contract.clusters.size(), 49u);
    EXPECT_EQ(w.contract.clusters.begin()->first, 2u);
    EXPECT_EQ(w.contract.clusters.rbegin()->first, 50u);
    const auto& two = w.contract.clusters.at(2);
    EXPECT_EQ(std::vector<std::uint64_t>(two.config.coords().begin(), two.config.coords().end()),
              (std::vector<std::uint64_t>{0, 0, 0, 1'000'000, 0, 0}));
    EXPECT_EQ(two.energy.micro, 0);
    EXPECT_EQ(w.contract.clusters.at(3).energy.micro, -437'500);
    EXPECT_EQ(w.contract.clusters.at(4).energy.micro, -875'000);
    EXPECT_EQ(w.contract.clusters.at(8).energy.micro, -5'820'645);
    for (const auto& [n, rec] : w.contract.clusters) {
        EXPECT_EQ(rec.contributor, kOwner);
        EXPECT_EQ(rec.config.particle_count(), n);
        EXPECT_EQ(rec.energy, calc_energy(rec.config));
    }
    EXPECT_EQ(w.ledger.balance_of(kOwner).value, 1000u);
    EXPECT_EQ(w.ledger.total_supply().value, 1000u);
    EXPECT_TRUE(w.contract.rates.empty());
    EXPECT_TRUE(w.contract.access.empty());
}

TEST(Genesis, RejectsBadParams) {
    ContractParams p;
    p.delta = {0, 100};
    EXPECT_EQ(code_of([&] { genesis_world(p); }), ErrorCode::BadParams);
    p.delta = {100, 100};
    EXPECT_EQ(code_of([&] { genesis_world(p); }), ErrorCode::BadParams);
    p.delta = {3, 100};
    p.rho = {0};
    EXPECT_EQ(code_of([&] { genesis_world(p); }), ErrorCode::BadParams);
}

TEST(MineToken, TetrahedronBeatsGenesis) {
    auto w = fresh();
    const auto r = mine_token(w, kAlice, test::tetrahedron());
    EXPECT_TRUE(r.accepted);
    EXPECT_EQ(r.n, 4u);
    EXPECT_NEAR(r.energy.micro, -6'000'000, 3);
    EXPECT_EQ(r.previous_energy.micro, -875'000);
    EXPECT_EQ(r.reward.value, 10u);
    EXPECT_EQ(w.ledger.balance_of(kAlice).value, 10u);
    EXPECT_EQ(w.contract.clusters.at(4).contributor, kAlice);
    EXPECT_EQ(w.contract.clusters.at(4).config, test::tetrahedron());
}

TEST(MineToken, ResubmissionRejectedWithoutStateChange) {
    auto w = fresh();
    mine_token(w, kAlice, test::tetrahedron());
    const auto before = w;
    const auto r = mine_token(w, kBob, test::tetrahedron());
    EXPECT_FALSE(r.accepted);
    EXPECT_EQ(r.reward.value, 0u);
    EXPECT_EQ(r.energy, r.previous_energy);
    EXPECT_EQ(w, before);
    // Resubmitting the genesis lattice itself is rejected too.
    EXPECT_FALSE(mine_token(w, kBob, simple_cubic_fixed(ClusterSize(8))).accepted);
    EXPECT_EQ(w, before);
}

TEST(MineToken, DimerAgainstZeroStoredEnergy) {
    auto w = fresh();
    const auto r = mine_token(w, kAlice, test::dimer(1'122'462));
    EXPECT_TRUE(r.accepted);
    EXPECT_EQ(r.previous_energy.micro, 0);
    EXPECT_EQ(r.energy.micro, -1'000'000);
}

TEST(MineToken, OnePercentImprovementRejected) {
    // Blend the n=8 genesis lattice toward a 1.1-sigma lattice and bisect with
    // the long-double oracle for a 2% improvement.
    auto w = fresh();
    const auto start = test::scaled_lattice(8, 1.0);
    const auto target = test::scaled_lattice(8, 1.1);
    auto blend = [&](long double t) {
        std::vector<long double> p;
        for (std::size_t k = 0; k < start.size(); ++k) {
            p.push_back((start[k] + t * (static_cast<long double>(target[k]) - start[k])) / 1e6L);
        }
        return ClusterConfig::from_coords(test::to_micro(p));
    };
    const long double e0 = test::oracle_energy(blend(0));
    long double lo = 0, hi = 1;
    for (int i = 0; i < 60; ++i) {
        const long double mid = (lo + hi) / 2;
        ((test::oracle_energy(blend(mid)) - e0) / std::fabs(e0) > -0.02L ? lo : hi) = mid;
    }
    const auto c = blend(hi);
    const long double gain = (e0 - test::oracle_energy(c)) / std::fabs(e0);
    ASSERT_GT(gain, 0.01L);
    ASSERT_LT(gain, 0.03L);
    const auto before = w;
    const auto r = mine_token(w, kAlice, c);
    EXPECT_FALSE(r.accepted);
    EXPECT_LT(r.energy, r.previous_energy);
    EXPECT_EQ(w, before);
}

TEST(DeltaRule, BoundaryCases) {
    const Ratio d{3, 100};
    EXPECT_TRUE(improves({-1}, {0}, d));
    EXPECT_FALSE(improves({0}, {0}, d));
    EXPECT_FALSE(improves({-1'030'000}, {-1'000'000}, d));  // exactly 3%: strict inequality
    EXPECT_TRUE(improves({-1'030'001}, {-1'000'000}, d));
    EXPECT_FALSE(improves({970'000}, {1'000'000}, d));
    EXPECT_TRUE(improves({969'999}, {1'000'000}, d));
    const auto max = std::numeric_limits<std::int64_t>::max();
    EXPECT_TRUE(improves({-max}, {max}, d));
    EXPECT_FALSE(improves({max}, {-max}, d));
    EXPECT_FALSE(improves({-max}, {-max}, Ratio{1, 1'000'000'000'000}));
}

TEST(DeltaRule, MatchesRationalOracle) {
    std::mt19937_64 rng(41);
    const std::int64_t scales[] = {10, 1'000'000, 100'000'000'000, std::numeric_limits<std::int64_t>::max() / 2};
    std::size_t near_boundary = 0;
    for (int i = 0; i < 20'000; ++i) {
        const Ratio d{1 + rng() % 999, 1000};
        const std::int64_t scale = scales[rng() % 4];
        const std::int64_t e = static_cast<std::int64_t>(rng() % (2 * static_cast<std::uint64_t>(scale))) - scale;
        std::int64_t u;
        if (rng() % 2 == 0) {
            // Land on or right next to the threshold.
            const cpp_rational t = cpp_rational(e) - cpp_rational(d.num) / d.den * abs(cpp_rational(e));
            u = static_cast<std::int64_t>(boost::multiprecision::numerator(t) / boost::multiprecision::denominator(t));
            u += static_cast<std::int64_t>(rng() % 5) - 2;
            ++near_boundary;
        } else {
            u = static_cast<std::int64_t>(rng() % (2 * static_cast<std::uint64_t>(scale))) - scale;
        }
        ASSERT_EQ(improves({u}, {e}, d), oracle_improves(u, e, d)) << "u=" << u << " e=" << e;
    }
    EXPECT_GT(near_boundary, 5000u);
}

TEST(GainAccess, ChargesOneTokenToContributor) {
    auto w = fresh();
    mine_token(w, kCarol, test::tetrahedron());  // carol now contributes n=4, holds 10
    w.ledger.transfer(kOwner, kAlice, {5});
    gain_access(w, kAlice, 4);
    EXPECT_EQ(w.ledger.balance_of(kAlice).value, 4u);
    EXPECT_EQ(w.ledger.balance_of(kCarol).value, 11u);
    EXPECT_TRUE(has_access(w, kAlice, 4));

    const auto before = w;
    EXPECT_EQ(code_of([&] { gain_access(w, kAlice, 4); }), ErrorCode::AlreadyGranted);
    EXPECT_EQ(w, before);
    EXPECT_EQ(code_of([&] { gain_access(w, kBob, 4); }), ErrorCode::InsufficientBalance);
    EXPECT_EQ(code_of([&] { gain_access(w, kAlice, 51); }), ErrorCode::BadClusterSize);
    EXPECT_EQ(code_of([&] { gain_access(w, kAlice, 1); }), ErrorCode::BadClusterSize);
    EXPECT_EQ(w, before);
}

TEST(GainAccess, BalanceOfExactlyOneSuffices) {
    auto w = fresh();
    w.ledger.transfer(kOwner, kAlice, {1});
    gain_access(w, kAlice, 7);
    EXPECT_EQ(w.ledger.balance_of(kAlice).value, 0u);
    EXPECT_EQ(w.ledger.balance_of(kOwner).value, 1000u);
}

TEST(ViewData, AccessRules) {
    auto w = fresh();
    mine_token(w, kAlice, test::tetrahedron());
    EXPECT_EQ(view_data(w, kAlice, 4).config, test::tetrahedron());  // contributor
    EXPECT_EQ(view_data(w, kOwner, 4).contributor, kAlice);          // owner
    EXPECT_EQ(code_of([&] { view_data(w, kBob, 4); }), ErrorCode::AccessDenied);
    EXPECT_EQ(code_of([&] { view_data(w, kBob, 60); }), ErrorCode::BadClusterSize);

    // Grantee keeps access and sees the newer structure after a later mine.
    w.ledger.transfer(kOwner, kBob, {3});
    gain_access(w, kBob, 2);
    EXPECT_EQ(view_data(w, kBob, 2).energy.micro, 0);
    mine_token(w, kCarol, test::dimer(1'122'462));
    EXPECT_EQ(view_data(w, kBob, 2).energy.micro, -1'000'000);
    EXPECT_EQ(view_data(w, kBob, 2).contributor, kCarol);
}

TEST(ExchangeRate, SetAndEffective) {
    auto w = fresh();
    set_exchange_rate(w, kAlice, {200});
    EXPECT_EQ(w.contract.rates.at(kAlice).tokens_per_coin, 200u);
    set_exchange_rate(w, kOwner, {50});
    EXPECT_EQ(w.contract.rates.at(kOwner).tokens_per_coin, 100u);
    const auto before = w;
    EXPECT_EQ(code_of([&] { set_exchange_rate(w, kAlice, {0}); }), ErrorCode::ZeroRate);
    EXPECT_EQ(w, before);

    EXPECT_EQ(effective_rate(w, kBob).tokens_per_coin, 100u);
    set_exchange_rate(w, kBob, {250});
    EXPECT_EQ(effective_rate(w, kBob).tokens_per_coin, 250u);
    EXPECT_EQ(effective_rate(fresh(), kOwner).tokens_per_coin, 100u);
}

TEST(BuyToken, Examples) {
    auto w = fresh();
    w.ledger.native_credit(kAlice, {2'000'000'000});
    EXPECT_EQ(buy_token(w, kAlice, kOwner, {500'000'000}).value, 50u);
    EXPECT_EQ(w.ledger.balance_of(kAlice).value, 50u);
    EXPECT_EQ(w.ledger.balance_of(kOwner).value, 950u);
    EXPECT_EQ(w.ledger.native_balance_of(kOwner).value, 500'000'000u);
    EXPECT_EQ(w.ledger.native_balance_of(kAlice).value, 1'500'000'000u);

    const auto before = w;
    EXPECT_EQ(code_of([&] { buy_token(w, kAlice, kOwner, {1'000'000}); }), ErrorCode::DustPurchase);
    EXPECT_EQ(code_of([&] { buy_token(w, kAlice, kOwner, {3'000'000'000}); }), ErrorCode::InsufficientNative);
    mine_token(w, kCarol, test::tetrahedron());  // carol holds 10
    const auto with_carol = w;
    EXPECT_EQ(code_of([&] { buy_token(w, kAlice, kCarol, {500'000'000}); }),
              ErrorCode::SellerInsufficientTokens);
    EXPECT_EQ(w, with_carol);
    EXPECT_NE(w, before);
}

TEST(BuyToken, LargeValuesDoNotOverflow) {
    auto w = fresh();
    w.ledger.native_credit(kAlice, {std::numeric_limits<std::uint64_t>::max()});
    set_exchange_rate(w, kOwner, {1'000'000});
    // floor((2^64-1) * 1e6 / 1e9) far exceeds the owner's 1000 LJT.
    EXPECT_EQ(code_of([&] { buy_token(w, kAlice, kOwner, {std::numeric_limits<std::uint64_t>::max()}); }),
              ErrorCode::SellerInsufficientTokens);
    EXPECT_EQ(buy_token(w, kAlice, kOwner, {1'000'000}).value, 1000u);
}

TEST(Leaderboards, TopBalance) {
    World empty;
    EXPECT_TRUE(view_top_balance(empty).empty());

    World w;
    w.ledger.mint(kAlice, {5});
    w.ledger.mint(kBob, {9});
    w.ledger.mint(kCarol, {5});
    const auto top = view_top_balance(w);
    ASSERT_EQ(top.size(), 3u);
    EXPECT_EQ(top[0].first, kBob);
    EXPECT_EQ(top[1].first, kAlice);  // tie at 5: address ascending
    EXPECT_EQ(top[2].first, kCarol);

    World many;
    for (std::uint8_t i = 1; i <= 12; ++i) many.ledger.mint(test::addr(i), {i});
    const auto ten = view_top_balance(many);
    ASSERT_EQ(ten.size(), 10u);
    EXPECT_EQ(ten.front().second.value, 12u);
    EXPECT_EQ(ten.back().second.value, 3u);
}

TEST(Leaderboards, TopRate) {
    auto w = fresh();
    w.ledger.transfer(kOwner, kAlice, {10});
    w.ledger.transfer(kOwner, kBob, {10});
    set_exchange_rate(w, kAlice, {100});
    set_exchange_rate(w, kBob, {300});
    set_exchange_rate(w, kCarol, {900});  // holds no tokens: excluded
    const auto top = view_top_rate(w);
    ASSERT_EQ(top.size(), 3u);
    EXPECT_EQ(top[0].first, kBob);
    EXPECT_EQ(top[0].second.tokens_per_coin, 300u);
    EXPECT_EQ(top[1].first, kOwner);  // unset owner shows R_min, ties by address
    EXPECT_EQ(top[1].second.tokens_per_coin, 100u);
    EXPECT_EQ(top[2].first, kAlice);

    World none;
    set_exchange_rate(none, kAlice, {5});
    EXPECT_TRUE(view_top_rate(none).empty());
}

// Random transaction sequences: rejected or failing operations leave the world
// bit-identical, the database stays consistent and monotone, and supply
// accounting holds.
TEST(ContractProperty, RandomSequences) {
    std::mt19937_64 rng(57);
    const std::vector<Address> who{kOwner, kAlice, kBob, kCarol, test::kDave};
    const double spacings[] = {0.95, 1.0, 1.05, 1.08, 1.1, 1.12, 1.122462, 1.2};
    for (int run = 0; run < 30; ++run) {
        auto w = fresh();
        for (const auto& a : who) w.ledger.native_credit(a, {5'000'000'000});
        std::size_t accepted = 0;
        std::uint64_t native_total = 0;
        for (const auto& [a, v] : w.ledger.native_balances()) native_total += v.value;

        for (int step = 0; step < 150; ++step) {
            const auto& caller = who[rng() % who.size()];
            const auto before = w;
            bool changed = true;
            try {
                switch (rng() % 6) {
                    case 0: case 1: {
                        const std::size_t n = 2 + rng() % 10;
                        const auto pos = ClusterConfig::from_coords(test::scaled_lattice(n, spacings[rng() % 8]));
                        const auto prev = w.contract.clusters.at(n);
                        const auto r = mine_token(w, caller, pos);
                        changed = r.accepted;
                        EXPECT_EQ(r.accepted, improves(r.energy, prev.energy, w.contract.params.delta));
                        if (r.accepted) {
                            ++accepted;
                            EXPECT_EQ(r.reward.value, 10u);
                            EXPECT_TRUE(improves(w.contract.clusters.at(n).energy, prev.energy, {3, 100}));
                        } else {
                            EXPECT_EQ(r.reward.value, 0u);
                        }
                        break;
                    }
                    case 2: {
                        const std::size_t n = 2 + rng() % 10;
                        const auto contributor = w.contract.clusters.at(n).contributor;
                        const auto c0 = w.ledger.balance_of(contributor).value;
                        const auto p0 = w.ledger.balance_of(caller).value;
                        gain_access(w, caller, n);
                        if (contributor != caller) {
                            EXPECT_EQ(w.ledger.balance_of(contributor).value, c0 + 1);
                            EXPECT_EQ(w.ledger.balance_of(caller).value, p0 - 1);
                        }
                        break;
                    }
                    case 3: set_exchange_rate(w, caller, {rng() % 400}); break;
                    case 4:
                        buy_token(w, caller, who[rng() % who.size()], {(rng() % 4) * 400'000'000 + rng() % 3});
                        break;
                    default: w.ledger.transfer(caller, who[rng() % who.size()], {rng() % 30}); break;
                }
            } catch (const Error&) {
                changed = false;
            }
            if (!changed) ASSERT_EQ(w, before);

            std::uint64_t sum = 0, native = 0;
            for (const auto& [a, v] : w.ledger.token_balances()) sum += v.value;
            for (const auto& [a, v] : w.ledger.native_balances()) native += v.value;
            ASSERT_EQ(sum, w.ledger.total_supply().value);
            ASSERT_EQ(w.ledger.total_supply().value, 1000 + 10 * accepted);
            ASSERT_EQ(native, native_total);
            for (const auto& [n, rec] : w.contract.clusters) {
                ASSERT_EQ(rec.energy, calc_energy(rec.config));
                ASSERT_LE(rec.energy, before.contract.clusters.at(n).energy);
            }
        }
    }
}

TEST(ContractProperty, LeaderboardsIgnoreNativeScale) {
    std::mt19937_64 rng(61);
    for (int run = 0; run < 50; ++run) {
        World w;
        for (std::uint8_t i = 1; i <= 15; ++i) {
            const auto a = test::addr(i);
            if (rng() % 3) w.ledger.mint(a, {rng() % 6});
            if (rng() % 2) set_exchange_rate(w, a, {1 + rng() % 5});
            w.ledger.native_credit(a, {rng() % 1'000'000});
        }
        const auto tb = view_top_balance(w);
        const auto tr = view_top_rate(w);
        const std::uint64_t k = 2 + rng() % 1000;
        World scaled = w;
        std::map<Address, NativeAmount> native;
        for (const auto& [a, v] : w.ledger.native_balances()) native[a] = {v.value * k};
        scaled.ledger = LedgerState::restore(w.ledger.token_balances(), native, w.ledger.total_supply());
        EXPECT_EQ(view_top_balance(scaled), tb);
        EXPECT_EQ(view_top_rate(scaled), tr);
    }
}
