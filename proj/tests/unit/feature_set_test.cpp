#include "promptllr/feature_set.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <limits>
#include <random>
#include <set>

#include "promptllr/error.hpp"
#include "promptllr/io.hpp"
#include "test_util.hpp"

using namespace promptllr;

namespace {

constexpr std::size_t kHeaderBytes = 38;

FeatureSet tiny_set() {
  FeatureSet fs;
  fs.features.resize(2, 3);
  fs.features << 0.5f, -1.0f, 2.0f, 3.25f, 0.0f, -7.5f;
  fs.labels = {0, 1};
  fs.meta.class_count = 2;
  fs.meta.dataset_name = "tiny";
  fs.meta.model_name = "unit";
  return fs;
}

FeatureSet random_set(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_dist(1, 40), d_dist(1, 24), c_dist(2, 6), kind_dist(0, 1), tag_dist(1, 5);
  std::normal_distribution<float> normal(0.0f, 10.0f);
  FeatureSet fs;
  const int n = n_dist(rng), d = d_dist(rng);
  fs.meta.class_count = static_cast<std::uint32_t>(c_dist(rng));
  fs.features.resize(n, d);
  for (Eigen::Index i = 0; i < fs.features.size(); ++i) fs.features.data()[i] = normal(rng);
  std::uniform_int_distribution<std::int32_t> label(0, static_cast<std::int32_t>(fs.meta.class_count) - 1);
  for (int i = 0; i < n; ++i) fs.labels.push_back(label(rng));
  if (kind_dist(rng) == 1) {
    fs.meta.feature_kind = FeatureKind::vp_classifier;
    fs.meta.prompt_tag = static_cast<PromptTag>(tag_dist(rng));
    if (kind_dist(rng) == 1) fs.meta.prompt_seed = static_cast<std::int64_t>(rng()) ;
  }
  fs.meta.dataset_name = "set-" + std::to_string(rng() % 1000) + " \xc3\xa9\"quoted\"";
  fs.meta.model_name = "model/" + std::to_string(d);
  return fs;
}

ErrorCode decode_error(const std::vector<std::uint8_t>& bytes) {
  try {
    decode_feature_set(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "decode unexpectedly succeeded";
  return ErrorCode::io_failure;
}

template <typename T>
void poke(std::vector<std::uint8_t>& bytes, std::size_t offset, T value) {
  std::memcpy(bytes.data() + offset, &value, sizeof(T));
}

}  // namespace

TEST(FeatureSetFile, MinimalValidFileLoads) {
  const auto dir = testutil::scratch_dir("fst_minimal");
  write_feature_set(tiny_set(), dir / "tiny.fst");
  const auto loaded = load_feature_set(dir / "tiny.fst");
  EXPECT_EQ(loaded.sample_count(), 2u);
  EXPECT_EQ(loaded.dim(), 3u);
  EXPECT_EQ(loaded, tiny_set());
}

TEST(FeatureSetFile, OneByOneSetHasSinglePayloadWord) {
  FeatureSet fs;
  fs.features.resize(1, 1);
  fs.features(0, 0) = 1.5f;
  fs.labels = {1};
  fs.meta.class_count = 2;
  const auto bytes = encode_feature_set(fs);
  const std::string trailer = R"({"dataset_name":"","model_name":""})";
  ASSERT_EQ(bytes.size(), kHeaderBytes + 4 + 4 + 4 + trailer.size());
  float payload;
  std::memcpy(&payload, bytes.data() + kHeaderBytes, 4);
  EXPECT_EQ(payload, 1.5f);
  std::int32_t label;
  std::memcpy(&label, bytes.data() + kHeaderBytes + 4, 4);
  EXPECT_EQ(label, 1);
  EXPECT_EQ(std::string(bytes.end() - static_cast<std::ptrdiff_t>(trailer.size()), bytes.end()), trailer);
}

TEST(FeatureSetFile, HeaderLayoutIsLittleEndianFixedFields) {
  auto fs = tiny_set();
  fs.meta.feature_kind = FeatureKind::vp_classifier;
  fs.meta.prompt_tag = PromptTag::mini_ft_5;
  fs.meta.prompt_seed = -42;
  fs.meta.class_count = 7;
  fs.labels = {6, 3};
  const auto b = encode_feature_set(fs);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "FSTv");
  EXPECT_EQ(b[4] | (b[5] << 8), 1);          // version
  EXPECT_EQ(b[6] | (b[7] << 8), 1);          // flags: has seed
  EXPECT_EQ(b[8], 2);                        // n
  EXPECT_EQ(b[16], 3);                       // D
  EXPECT_EQ(b[24], 7);                       // C
  EXPECT_EQ(b[28], 1);                       // vp_classifier
  EXPECT_EQ(b[29], 4);                       // mini_ft_5
  std::int64_t seed;
  std::memcpy(&seed, b.data() + 30, 8);
  EXPECT_EQ(seed, -42);
}

TEST(FeatureSetFile, RandomSetsRoundTripByteExactly) {
  std::mt19937_64 rng(99);
  const auto dir = testutil::scratch_dir("fst_roundtrip");
  for (int i = 0; i < 200; ++i) {
    const auto fs = random_set(rng);
    const auto path = dir / "set.fst";
    write_feature_set(fs, path);
    const auto first = read_file_bytes(path);
    const auto loaded = load_feature_set(path);
    EXPECT_EQ(loaded, fs);
    write_feature_set(loaded, path);
    EXPECT_EQ(read_file_bytes(path), first) << "iteration " << i;
  }
}

TEST(FeatureSetFile, Random100x16RoundTrips) {
  std::mt19937_64 rng(100);
  auto fs = testutil::random_instance(rng, 100, 16, 5);
  const auto bytes = encode_feature_set(fs);
  EXPECT_EQ(encode_feature_set(decode_feature_set(bytes)), bytes);
}

TEST(FeatureSetFile, RefusesToWriteNonFinite) {
  auto fs = tiny_set();
  fs.features(1, 2) = std::numeric_limits<float>::quiet_NaN();
  const auto dir = testutil::scratch_dir("fst_nan");
  try {
    write_feature_set(fs, dir / "nan.fst");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::non_finite_value);
  }
  EXPECT_FALSE(std::filesystem::exists(dir / "nan.fst"));
}

TEST(FeatureSetFile, PayloadLengthMismatchIsDimensionError) {
  auto bytes = encode_feature_set(tiny_set());
  auto shorter = bytes;
  shorter.erase(shorter.begin() + kHeaderBytes, shorter.begin() + kHeaderBytes + 4);
  EXPECT_EQ(decode_error(shorter), ErrorCode::dimension_mismatch);
  auto longer = bytes;
  longer.push_back(0);
  EXPECT_EQ(decode_error(longer), ErrorCode::dimension_mismatch);
  auto lying = bytes;
  poke<std::uint64_t>(lying, 16, 4);  // claim D = 4
  EXPECT_EQ(decode_error(lying), ErrorCode::dimension_mismatch);
  auto huge = bytes;
  poke<std::uint64_t>(huge, 8, std::numeric_limits<std::uint64_t>::max() / 2);
  EXPECT_EQ(decode_error(huge), ErrorCode::dimension_mismatch);
}

TEST(FeatureSetFile, CorruptHeadersAreRejectedWithDeclaredErrors) {
  const auto good = encode_feature_set(tiny_set());

  auto magic = good;
  magic[3] = 'x';
  EXPECT_EQ(decode_error(magic), ErrorCode::bad_magic);
  EXPECT_EQ(decode_error({'F', 'S'}), ErrorCode::bad_magic);

  auto version = good;
  poke<std::uint16_t>(version, 4, 2);
  EXPECT_EQ(decode_error(version), ErrorCode::version_mismatch);

  auto nan = good;
  poke<float>(nan, kHeaderBytes + 8, std::numeric_limits<float>::infinity());
  EXPECT_EQ(decode_error(nan), ErrorCode::non_finite_value);

  auto label = good;
  poke<std::int32_t>(label, kHeaderBytes + 24 + 4, 2);  // second label = C
  EXPECT_EQ(decode_error(label), ErrorCode::label_out_of_range);
  auto negative = good;
  poke<std::int32_t>(negative, kHeaderBytes + 24, -1);
  EXPECT_EQ(decode_error(negative), ErrorCode::label_out_of_range);

  auto kind = good;
  kind[28] = 1;  // vp_classifier with tag none
  EXPECT_EQ(decode_error(kind), ErrorCode::invalid_metadata);

  auto classes = good;
  poke<std::uint32_t>(classes, 24, 1);
  EXPECT_EQ(decode_error(classes), ErrorCode::invalid_metadata);

  auto trailer = good;
  trailer[trailer.size() - 2] = '!';
  EXPECT_EQ(decode_error(trailer), ErrorCode::invalid_metadata);
}

TEST(FeatureSetFile, MissingFileIsIoFailure) {
  try {
    load_feature_set("/nonexistent/definitely/not/here.fst");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io_failure);
  }
}

TEST(FeatureSetValidate, KindAndTagMustAgree) {
  auto fs = tiny_set();
  fs.meta.prompt_tag = PromptTag::gaussian;
  EXPECT_THROW(fs.validate(), Error);
  fs.meta.feature_kind = FeatureKind::vp_classifier;
  EXPECT_NO_THROW(fs.validate());
  fs.meta.prompt_tag = PromptTag::none;
  EXPECT_THROW(fs.validate(), Error);
}

TEST(MixFeatureSets, TenPlusTwoClasses) {
  std::mt19937_64 rng(1);
  const auto a = testutil::random_instance(rng, 100, 8, 10);
  const auto b = testutil::random_instance(rng, 200, 8, 47);
  const auto mix = mix_feature_sets(a, b, 2);
  EXPECT_EQ(mix.class_count(), 12u);
  std::size_t expected = a.sample_count();
  for (auto y : b.labels) expected += y < 2 ? 1 : 0;
  EXPECT_EQ(mix.sample_count(), expected);
  for (std::size_t i = 0; i < a.sample_count(); ++i) EXPECT_EQ(mix.labels[i], a.labels[i]);
  for (std::size_t i = a.sample_count(); i < mix.sample_count(); ++i) {
    EXPECT_GE(mix.labels[i], 10);
    EXPECT_LT(mix.labels[i], 12);
  }
  EXPECT_NO_THROW(mix.validate());
}

TEST(MixFeatureSets, FullClassCountIsOffsetConcatenation) {
  std::mt19937_64 rng(2);
  const auto a = testutil::random_instance(rng, 20, 3, 2);
  const auto b = testutil::random_instance(rng, 30, 3, 4);
  const auto mix = mix_feature_sets(a, b, 4);
  ASSERT_EQ(mix.sample_count(), 50u);
  EXPECT_TRUE(mix.features.topRows(20) == a.features);
  EXPECT_TRUE(mix.features.bottomRows(30) == b.features);
  for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(mix.labels[20 + i], b.labels[i] + 2);
}

TEST(MixFeatureSets, AssociativeForFullClassCounts) {
  std::mt19937_64 rng(3);
  const auto a = testutil::random_instance(rng, 10, 4, 2);
  const auto b = testutil::random_instance(rng, 12, 4, 3);
  const auto c = testutil::random_instance(rng, 9, 4, 2);
  const auto left = mix_feature_sets(mix_feature_sets(a, b, 3), c, 2);
  const auto right = mix_feature_sets(a, mix_feature_sets(b, c, 2), 5);
  EXPECT_TRUE(left.features == right.features);
  EXPECT_EQ(left.labels, right.labels);
  EXPECT_EQ(left.class_count(), right.class_count());
}

TEST(MixFeatureSets, Errors) {
  std::mt19937_64 rng(4);
  const auto a = testutil::random_instance(rng, 10, 4, 2);
  const auto b = testutil::random_instance(rng, 10, 5, 3);
  const auto b4 = testutil::random_instance(rng, 10, 4, 3);
  const auto check = [](auto&& fn, ErrorCode code) {
    try {
      fn();
      ADD_FAILURE() << "no error";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code);
    }
  };
  check([&] { mix_feature_sets(a, b, 1); }, ErrorCode::dimension_mismatch);
  check([&] { mix_feature_sets(a, testutil::as_vp(b4), 1); }, ErrorCode::kind_mismatch);
  check([&] { mix_feature_sets(a, b4, 0); }, ErrorCode::out_of_range);
  check([&] { mix_feature_sets(a, b4, 4); }, ErrorCode::out_of_range);
}

TEST(Subsample, FullSizeIsIdentity) {
  std::mt19937_64 rng(5);
  const auto fs = testutil::random_instance(rng, 37, 3, 4);
  for (std::uint64_t seed : {0ULL, 1ULL, 12345ULL}) EXPECT_EQ(subsample(fs, 37, seed), fs);
}

TEST(Subsample, OnePerClassWhenMEqualsClassCount) {
  FeatureSet fs;
  fs.meta.class_count = 5;
  fs.features = FeatureMatrix::Random(50, 2);
  for (int i = 0; i < 50; ++i) fs.labels.push_back(i % 5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto sub = subsample(fs, 5, seed);
    const std::set<std::int32_t> seen(sub.labels.begin(), sub.labels.end());
    EXPECT_EQ(seen.size(), 5u);
  }
}

TEST(Subsample, DeterministicPerSeed) {
  std::mt19937_64 rng(6);
  const auto fs = testutil::random_instance(rng, 1000, 2, 10);
  EXPECT_EQ(subsample_indices(fs, 100, 7), subsample_indices(fs, 100, 7));
  EXPECT_NE(subsample_indices(fs, 100, 7), subsample_indices(fs, 100, 8));
}

TEST(Subsample, StratifiedWithFloorOfOne) {
  FeatureSet fs;
  fs.meta.class_count = 3;
  fs.features = FeatureMatrix::Random(103, 2);
  for (int i = 0; i < 103; ++i) fs.labels.push_back(i < 100 ? 0 : (i < 102 ? 1 : 2));
  for (std::size_t m : {3u, 4u, 10u, 50u, 102u}) {
    const auto sub = subsample(fs, m, 11);
    EXPECT_EQ(sub.sample_count(), m);
    const auto hist = sub.class_histogram();
    for (auto count : hist) EXPECT_GE(count, 1u) << "m=" << m;
  }
  const auto proportional = subsample(fs, 53, 3).class_histogram();
  EXPECT_EQ(proportional[2], 1u);
  EXPECT_GE(proportional[0], 50u);
}

TEST(Subsample, RejectsOutOfRange) {
  std::mt19937_64 rng(7);
  const auto fs = testutil::random_instance(rng, 10, 2, 2);
  EXPECT_THROW(subsample(fs, 0, 1), Error);
  EXPECT_THROW(subsample(fs, 11, 1), Error);
  EXPECT_EQ(subsample(fs, 1, 1).sample_count(), 1u);
}
