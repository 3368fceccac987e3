#include "edgetwin/trajectory.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <string>

#include "edgetwin/mobility.hpp"
#include "edgetwin/rng.hpp"

using namespace edgetwin;

namespace {

std::string write_fixture(const std::string& name, const std::string& text) {
    const std::string path = testing::TempDir() + name;
    std::ofstream out(path);
    out << text;
    return path;
}

}  // namespace

TEST(TdriveParse, TwoPointLinearMotion) {
    // one taxi, 10 s apart, even motion in both axes; slot 2 s -> 6 slots
    const auto path = write_fixture("linear.txt",
                                    "1,2008-02-02 15:36:00,116.0,39.0\n"
                                    "1,2008-02-02 15:36:10,116.2,39.1\n");
    const TrajectorySet set = load_tdrive(path, 2.0, 2.0);
    ASSERT_EQ(set.trajectories.size(), 1u);
    EXPECT_EQ(set.malformed_rows, 0);
    EXPECT_EQ(set.non_monotonic_rows, 0);
    const auto& pos = set.trajectories[0].positions;
    ASSERT_EQ(pos.size(), 6u);
    // the bounding box spans the full motion, so slot k sits at u = k/5 of it
    for (std::size_t k = 0; k < pos.size(); ++k) {
        const double u = static_cast<double>(k) * 2.0 / 10.0;
        EXPECT_NEAR(pos[k].x_km, u * 2.0, 1e-6) << "slot " << k;
        EXPECT_NEAR(pos[k].y_km, u * 2.0, 1e-6) << "slot " << k;
    }
}

TEST(TdriveParse, HandInterpolatedSpotChecks) {
    // three samples with a speed change; box lon [116.0, 116.4], lat [39.0, 39.2]
    const auto path = write_fixture("spot.txt",
                                    "7,2008-02-02 00:00:00,116.0,39.0\n"
                                    "7,2008-02-02 00:00:20,116.1,39.2\n"
                                    "7,2008-02-02 00:01:00,116.4,39.0\n");
    const TrajectorySet set = load_tdrive(path, 1.0, 15.0);
    ASSERT_EQ(set.trajectories.size(), 1u);
    const auto& pos = set.trajectories[0].positions;
    ASSERT_EQ(pos.size(), 5u);  // floor(60/15) + 1
    // t=15: inside segment one, u = 15/20 -> lon 116.075, lat 39.15
    EXPECT_NEAR(pos[1].x_km, (116.075 - 116.0) / 0.4, 1e-6);
    EXPECT_NEAR(pos[1].y_km, (39.15 - 39.0) / 0.2, 1e-6);
    // t=30: segment two, u = 10/40 -> lon 116.175, lat 39.15
    EXPECT_NEAR(pos[2].x_km, (116.175 - 116.0) / 0.4, 1e-6);
    EXPECT_NEAR(pos[2].y_km, (39.15 - 39.0) / 0.2, 1e-6);
    // t=60: exactly the last sample
    EXPECT_NEAR(pos[4].x_km, 1.0, 1e-6);
    EXPECT_NEAR(pos[4].y_km, 0.0, 1e-6);
}

TEST(TdriveParse, MidnightCrossingKeepsOrder) {
    const auto path = write_fixture("midnight.txt",
                                    "3,2008-02-02 23:59:50,116.0,39.0\n"
                                    "3,2008-02-03 00:00:10,116.2,39.1\n");
    const TrajectorySet set = load_tdrive(path, 1.0, 10.0);
    ASSERT_EQ(set.trajectories.size(), 1u);
    EXPECT_EQ(set.non_monotonic_rows, 0);
    EXPECT_EQ(set.trajectories[0].positions.size(), 3u);  // 20 s span, slot 10
}

TEST(TdriveParse, DuplicateAndBackwardsTimestampsDropped) {
    const auto path = write_fixture("dups.txt",
                                    "1,2008-02-02 15:36:00,116.0,39.0\n"
                                    "1,2008-02-02 15:36:00,116.3,39.3\n"
                                    "1,2008-02-02 15:35:00,116.4,39.4\n"
                                    "1,2008-02-02 15:36:10,116.2,39.1\n");
    const TrajectorySet set = load_tdrive(path, 1.0, 5.0);
    ASSERT_EQ(set.trajectories.size(), 1u);
    EXPECT_EQ(set.non_monotonic_rows, 2);
    EXPECT_EQ(set.trajectories[0].samples.size(), 2u);
}

TEST(TdriveParse, MalformedRowsSkippedAndCounted) {
    const auto path = write_fixture("bad.txt",
                                    "1,2008-02-02 15:36:00,116.0,39.0\n"
                                    "not,a,row\n"
                                    "1,2008-99-99 15:36:05,116.1,39.05\n"
                                    "1,2008-02-02 15:36:05,abc,39.05\n"
                                    "1,2008-02-02 15:36:06,116.05,\n"
                                    "\n"
                                    "1,2008-02-02 15:36:10,116.2,39.1\n");
    const TrajectorySet set = load_tdrive(path, 1.0, 5.0);
    ASSERT_EQ(set.trajectories.size(), 1u);
    EXPECT_EQ(set.malformed_rows, 4);
    EXPECT_EQ(set.trajectories[0].samples.size(), 2u);
}

TEST(TdriveParse, SingleSampleTrajectoriesAreUnusable) {
    const auto path = write_fixture("single.txt", "1,2008-02-02 15:36:00,116.0,39.0\n");
    EXPECT_THROW(load_tdrive(path, 1.0, 5.0), DataError);
}

TEST(TdriveParse, MissingFileThrowsDataError) {
    EXPECT_THROW(load_tdrive("/nonexistent/tdrive.txt", 1.0, 5.0), DataError);
}

TEST(TdriveParse, BadGeometryArgumentsThrowConfigError) {
    const auto path = write_fixture("geom.txt",
                                    "1,2008-02-02 15:36:00,116.0,39.0\n"
                                    "1,2008-02-02 15:36:10,116.2,39.1\n");
    EXPECT_THROW(load_tdrive(path, 0.0, 5.0), ConfigError);
    EXPECT_THROW(load_tdrive(path, 1.0, 0.0), ConfigError);
}

TEST(TdriveParse, TwoTaxisStaySeparate) {
    const auto path = write_fixture("two.txt",
                                    "9,2008-02-02 15:00:00,116.0,39.0\n"
                                    "4,2008-02-02 15:00:00,116.4,39.2\n"
                                    "9,2008-02-02 15:00:10,116.4,39.2\n"
                                    "4,2008-02-02 15:00:10,116.0,39.0\n");
    const TrajectorySet set = load_tdrive(path, 1.0, 10.0);
    ASSERT_EQ(set.trajectories.size(), 2u);
    EXPECT_EQ(set.trajectories[0].user_id, "9");  // first appearance order
    EXPECT_EQ(set.trajectories[1].user_id, "4");
    EXPECT_NEAR(set.trajectories[0].positions.front().x_km, 0.0, 1e-12);
    EXPECT_NEAR(set.trajectories[1].positions.front().x_km, 1.0, 1e-12);
}

// ---------------------------------------------------------------------------
// replay through MobilitySource
// ---------------------------------------------------------------------------

TEST(Replay, FollowsSlotsThenHoldsLastPosition) {
    const auto path = write_fixture("replay.txt",
                                    "1,2008-02-02 00:00:00,116.0,39.0\n"
                                    "1,2008-02-02 00:00:20,116.2,39.1\n");
    MobilitySource src(load_tdrive(path, 1.0, 10.0));  // 3 slots
    ASSERT_TRUE(src.is_replay());

    MobileUser user;
    user.id = 0;
    Rng rng(1);
    std::vector<MobileUser> users{user};
    src.reset(users, 1.0, rng);

    Position pos = src.initial_position(user);
    EXPECT_NEAR(pos.x_km, 0.0, 1e-12);
    const double say = 99.0;  // replay ignores speed and slot length
    pos = src.advance(user, pos, say, say, rng);
    src.end_of_slot();
    EXPECT_NEAR(pos.x_km, 0.5, 1e-9);
    pos = src.advance(user, pos, say, say, rng);
    src.end_of_slot();
    EXPECT_NEAR(pos.x_km, 1.0, 1e-9);
    for (int t = 0; t < 3; ++t) {  // ran out: hold the last position
        pos = src.advance(user, pos, say, say, rng);
        src.end_of_slot();
        EXPECT_NEAR(pos.x_km, 1.0, 1e-9);
    }
}

TEST(Replay, UsersMapOntoTrajectoriesRoundRobin) {
    const auto path = write_fixture("rr.txt",
                                    "a,2008-02-02 00:00:00,116.0,39.0\n"
                                    "a,2008-02-02 00:00:10,116.1,39.0\n"
                                    "b,2008-02-02 00:00:00,116.4,39.2\n"
                                    "b,2008-02-02 00:00:10,116.3,39.2\n");
    MobilitySource src(load_tdrive(path, 1.0, 10.0));
    MobileUser u0, u2;
    u0.id = 0;
    u2.id = 2;  // 2 % 2 -> trajectory "a" again
    EXPECT_EQ(src.initial_position(u0).x_km, src.initial_position(u2).x_km);
    MobileUser u1;
    u1.id = 1;
    EXPECT_NE(src.initial_position(u0).x_km, src.initial_position(u1).x_km);
}

TEST(Replay, EmptySetRejected) {
    EXPECT_THROW(MobilitySource(TrajectorySet{}), DataError);
}
