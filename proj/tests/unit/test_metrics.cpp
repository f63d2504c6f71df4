#include "dsub/metrics.hpp"

#include <gtest/gtest.h>

using namespace dsub;

TEST(Mac, IdentityAndScaleInvariance) {
    const Matrix a = Matrix::Identity(3, 3);
    EXPECT_TRUE(mac(a, a).isApprox(Matrix::Identity(3, 3)));
    Matrix b = a;
    b.col(1) *= -4.0;
    EXPECT_TRUE(mac(a, b).isApprox(Matrix::Identity(3, 3)));
}

TEST(Mac, HandValue) {
    Matrix a(2, 1), b(2, 1);
    a << 1, 0;
    b << 1, 1;
    EXPECT_NEAR(mac(a, b)(0, 0), 0.5, 1e-15);
}

TEST(Mac, Errors) {
    EXPECT_THROW(mac(Matrix::Identity(3, 2), Matrix::Identity(2, 2)), ModelError);
    Matrix z = Matrix::Identity(2, 2);
    z.col(1).setZero();
    EXPECT_THROW(mac(z, Matrix::Identity(2, 2)), ModelError);
    EXPECT_THROW(mac(Matrix::Identity(2, 2), z), ModelError);
}

TEST(FrequencyTable, RelativeErrorsAndNmse) {
    Vector full(3), reduced(4);
    full << 1, 2, 4;
    reduced << 1, 2.2, 4, 9;
    const FrequencyErrorTable t = frequency_error_table(full, reduced, 3);
    EXPECT_NEAR(t.relative_error(1), 0.1, 1e-15);
    EXPECT_DOUBLE_EQ(t.relative_error(0), 0.0);
    EXPECT_NEAR(t.max_abs_relative_error(), 0.1, 1e-15);
    EXPECT_NEAR(t.nmse, (0.04 / 3) / (21.0 / 3), 1e-15);
    EXPECT_THROW(frequency_error_table(full, reduced, 4), ModelError);
}

TEST(TrajectoryMse, Values) {
    const MseResult same = trajectory_mse({1, 2, 3}, {1, 2, 3});
    EXPECT_DOUBLE_EQ(same.mse, 0.0);
    EXPECT_DOUBLE_EQ(same.relative, 0.0);
    const MseResult r = trajectory_mse({1, 1}, {0, 2});
    EXPECT_DOUBLE_EQ(r.mse, 1.0);
    EXPECT_DOUBLE_EQ(r.relative, 0.5);
    const MseResult zero = trajectory_mse({0, 0}, {0, 0});
    EXPECT_DOUBLE_EQ(zero.relative, 0.0);
    EXPECT_THROW(trajectory_mse({1}, {1, 2}), ModelError);
    EXPECT_THROW(trajectory_mse({}, {}), ModelError);
}

TEST(Smoothness, Steps) {
    const Smoothness s = smoothness({0, 1, 1, 4});
    EXPECT_DOUBLE_EQ(s.max_step, 3.0);
    EXPECT_NEAR(s.rms_step, std::sqrt(10.0 / 3.0), 1e-15);
    EXPECT_THROW(smoothness({1}), ModelError);
}
