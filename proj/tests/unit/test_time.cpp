#include <catch2/catch_amalgamated.hpp>

#include "loadcast/time.hpp"
#include "loadcast/timezone.hpp"

using namespace loadcast;

TEST_CASE("civil day arithmetic round-trips day by day") {
    // Brute-force oracle: walk every day of 1968..2040 and check that
    // days_from_civil is the inverse of civil_from_days and increments by one.
    std::int64_t z = days_from_civil(1968, 1, 1);
    for (int year = 1968; year <= 2040; ++year) {
        for (int month = 1; month <= 12; ++month) {
            static const int md[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
            int days = md[month - 1];
            bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
            if (month == 2 && leap) days = 29;
            for (int day = 1; day <= days; ++day) {
                REQUIRE(days_from_civil(year, month, day) == z);
                CivilTime c = civil_from_days(z);
                REQUIRE(c.year == year);
                REQUIRE(c.month == month);
                REQUIRE(c.day == day);
                ++z;
            }
        }
    }
}

TEST_CASE("epoch anchors") {
    STATIC_REQUIRE(days_from_civil(1970, 1, 1) == 0);
    STATIC_REQUIRE(make_hour(1970, 1, 1, 0) == 0);
    STATIC_REQUIRE(make_hour(1970, 1, 2, 0) == 24);
    STATIC_REQUIRE(make_hour(1969, 12, 31, 23) == -1);
}

TEST_CASE("day_of_week is Monday-first") {
    REQUIRE(day_of_week(make_hour(1970, 1, 1, 0)) == 3);   // Thursday
    REQUIRE(day_of_week(make_hour(2024, 1, 1, 12)) == 0);  // Monday
    REQUIRE(day_of_week(make_hour(2015, 1, 4, 0)) == 6);   // Sunday
    REQUIRE(day_of_week(make_hour(1969, 12, 28, 5)) == 6); // Sunday, pre-epoch
    // consecutive days cycle 0..6
    for (int d = 0; d < 14; ++d)
        REQUIRE(day_of_week(static_cast<HourStamp>(d) * 24) == (3 + d) % 7);
}

TEST_CASE("hour helpers") {
    HourStamp h = make_hour(2019, 7, 31, 22);
    REQUIRE(hour_of_day(h) == 22);
    REQUIRE(month_of(h) == 7);
    REQUIRE(year_of(h) == 2019);
    REQUIRE(hour_of_day(-1) == 23);
    CivilTime c = civil_of(-1);
    REQUIRE(c.year == 1969);
    REQUIRE(c.month == 12);
    REQUIRE(c.day == 31);
}

TEST_CASE("timestamp parsing accepts documented shapes") {
    HourStamp base = make_hour(2015, 1, 1, 0);
    ParsedTime p = parse_timestamp("2015-01-01T00:00");
    REQUIRE(p.hour == base);
    REQUIRE_FALSE(p.had_offset);

    p = parse_timestamp("2015-01-01 00:00:00");
    REQUIRE(p.hour == base);
    REQUIRE_FALSE(p.had_offset);

    p = parse_timestamp("2015-01-01T00:00Z");
    REQUIRE(p.hour == base);
    REQUIRE(p.had_offset);

    // +01:00 wall clock means one hour earlier in UTC
    p = parse_timestamp("2015-01-01T01:00+01:00");
    REQUIRE(p.hour == base);
    REQUIRE(p.had_offset);

    p = parse_timestamp("2015-01-01T00:00-05:00");
    REQUIRE(p.hour == base + 5);
    REQUIRE(p.had_offset);

    // half-hour zone landing on a whole UTC hour is fine
    p = parse_timestamp("2015-01-01T05:30+05:30");
    REQUIRE(p.hour == base);
}

TEST_CASE("timestamp parsing rejects malformed and misaligned input") {
    REQUIRE_THROWS_AS(parse_timestamp("2015-01-01T00:30"), DataError);
    REQUIRE_THROWS_AS(parse_timestamp("2015-01-01T00:00:30"), DataError);
    REQUIRE_THROWS_AS(parse_timestamp("2015-01-01T00:30+01:00"), DataError);
    REQUIRE_THROWS_AS(parse_timestamp("2015-13-01T00:00"), DataError);
    REQUIRE_THROWS_AS(parse_timestamp("2015-01-32T00:00"), DataError);
    REQUIRE_THROWS_AS(parse_timestamp("2015-01-01T24:00"), DataError);
    REQUIRE_THROWS_AS(parse_timestamp("2015-01-01"), DataError);
    REQUIRE_THROWS_AS(parse_timestamp("2015-01-01T00:00X"), DataError);
    REQUIRE_THROWS_AS(parse_timestamp("2015-01-01T00:00 "), DataError);
    REQUIRE_THROWS_AS(parse_timestamp("15-01-01T00:00"), DataError);
    REQUIRE_THROWS_AS(parse_timestamp(""), DataError);
}

TEST_CASE("format_hour round-trips through the parser") {
    for (HourStamp h : {make_hour(2015, 1, 1, 0), make_hour(2019, 12, 31, 23),
                        make_hour(2016, 2, 29, 12), HourStamp{0}}) {
        std::string s = format_hour(h);
        REQUIRE(parse_timestamp(s).hour == h);
    }
    REQUIRE(format_hour(make_hour(2015, 6, 7, 8)) == "2015-06-07T08:00");
}

TEST_CASE("EU DST transitions land on the last Sunday at 01:00 UTC") {
    // 2019: March 31 and October 27. 2021: March 28 and October 31.
    REQUIRE(eu_transition(2019, 3) == make_hour(2019, 3, 31, 1));
    REQUIRE(eu_transition(2019, 10) == make_hour(2019, 10, 27, 1));
    REQUIRE(eu_transition(2021, 3) == make_hour(2021, 3, 28, 1));
    REQUIRE(eu_transition(2021, 10) == make_hour(2021, 10, 31, 1));
    for (int y = 2000; y <= 2030; ++y) {
        for (int m : {3, 10}) {
            HourStamp t = eu_transition(y, m);
            REQUIRE(hour_of_day(t) == 1);
            REQUIRE(day_of_week(t) == 6);
            CivilTime c = civil_of(t);
            REQUIRE(c.month == m);
            REQUIRE(c.day > 24);  // last week of a 31-day month
        }
    }
}

TEST_CASE("timezone offsets follow the uniform EU rule") {
    Timezone berlin = timezone_from_id("Europe/Berlin");
    REQUIRE(berlin.offset_minutes_at_utc(make_hour(2019, 1, 15, 12)) == 60);
    REQUIRE(berlin.offset_minutes_at_utc(make_hour(2019, 7, 15, 12)) == 120);
    REQUIRE(berlin.offset_minutes_at_utc(make_hour(2019, 3, 31, 0)) == 60);
    REQUIRE(berlin.offset_minutes_at_utc(make_hour(2019, 3, 31, 1)) == 120);
    REQUIRE(berlin.offset_minutes_at_utc(make_hour(2019, 10, 27, 0)) == 120);
    REQUIRE(berlin.offset_minutes_at_utc(make_hour(2019, 10, 27, 1)) == 60);

    Timezone london = timezone_from_id("Europe/London");
    REQUIRE(london.offset_minutes_at_utc(make_hour(2019, 1, 15, 12)) == 0);
    REQUIRE(london.offset_minutes_at_utc(make_hour(2019, 7, 15, 12)) == 60);

    Timezone moscow = timezone_from_id("Europe/Moscow");
    REQUIRE(moscow.offset_minutes_at_utc(make_hour(2019, 1, 15, 12)) == 180);
    REQUIRE(moscow.offset_minutes_at_utc(make_hour(2019, 7, 15, 12)) == 180);
    REQUIRE_FALSE(moscow.has_dst());
}

TEST_CASE("timezone id parsing") {
    REQUIRE(timezone_from_id("UTC").standard_offset_minutes() == 0);
    REQUIRE(timezone_from_id("UTC+01:00").standard_offset_minutes() == 60);
    REQUIRE(timezone_from_id("UTC-05:30").standard_offset_minutes() == -330);
    REQUIRE_FALSE(timezone_from_id("UTC+01:00").has_dst());
    REQUIRE_THROWS_AS(timezone_from_id("Mars/Olympus"), ConfigError);
    REQUIRE_THROWS_AS(timezone_from_id("UTC+1"), ConfigError);
    REQUIRE_THROWS_AS(timezone_from_id("UTC+25:00"), ConfigError);
}
