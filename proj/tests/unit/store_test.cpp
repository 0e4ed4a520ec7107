#include <gtest/gtest.h>

#include <filesystem>

#include "dsage/dsl.hpp"
#include "dsage/error.hpp"
#include "dsage/seed.hpp"
#include "dsage/store.hpp"
#include "generators.hpp"
#include "process.hpp"
#include "scenarios.hpp"

namespace dsage {
namespace {

namespace fs = std::filesystem;

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::io_error;
}

TEST(Digest, Sha256KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Digest, SeedMatchesFileHash) { EXPECT_EQ(kb_digest(seed_kb()), DSAGE_SEED_SHA256); }

TEST(FileStoreTest, KbRoundTrip) {
  testing::TempDir dir;
  FileStore store(dir / "store");
  const auto digest = store.put_kb(seed_kb());
  EXPECT_EQ(digest, kb_digest(seed_kb()));
  EXPECT_TRUE(store.has_kb(digest));
  EXPECT_TRUE(fs::exists(dir / "store" / "kb" / (digest + ".dkb")));
  EXPECT_EQ(store.load_kb(digest), seed_kb());
  EXPECT_EQ(store.put_kb(seed_kb()), digest);
}

TEST(FileStoreTest, TamperIsDetected) {
  testing::TempDir dir;
  FileStore store(dir.path());
  const auto digest = store.put_kb(seed_kb());
  const auto path = store.kb_path(digest);
  std::string text = testing::read_file(path);
  text[text.find("0.68")] = '1';
  testing::write_file(path, text);
  EXPECT_EQ(code_of([&] { store.load_kb(digest); }), ErrorCode::digest_mismatch);
}

TEST(FileStoreTest, MissingSnapshot) {
  testing::TempDir dir;
  FileStore store(dir.path());
  EXPECT_EQ(code_of([&] { store.load_kb(std::string(64, 'a')); }), ErrorCode::missing_snapshot);
  EXPECT_NE(code_of([&] { store.load_kb("../../etc/passwd"); }), ErrorCode::digest_mismatch);
  EXPECT_EQ(code_of([&] { store.load_session("nope"); }), ErrorCode::unknown_session);
}

TEST(FileStoreTest, HeadAndInitialize) {
  testing::TempDir dir;
  FileStore store(dir.path());
  EXPECT_FALSE(store.head());
  const auto [digest, initialized] = ensure_initialized(store, seed_kb());
  EXPECT_TRUE(initialized);
  EXPECT_EQ(store.head(), digest);
  FileStore reopened(dir.path());
  const auto again = ensure_initialized(reopened, KnowledgeBase{});
  EXPECT_FALSE(again.second);
  EXPECT_EQ(again.first, digest);
}

TEST(SessionRecord, FormatIsLineOriented) {
  Session s;
  s.id = "0123456789abcdef0123456789abcdef";
  s.created_at = Timestamp{std::chrono::seconds(1'792'398'600)};
  s.kb_version = std::string(64, 'f');
  s.wm = testing::wm_of({testing::observe("soil_moisture", "high", 0.5),
                         {{"moon", Verb::appears, "full"}, CertaintyFactor(1.0), ObservationSource::default_cf}});
  EXPECT_EQ(serialize_session(s),
            "dsage-session 1\n"
            "id 0123456789abcdef0123456789abcdef\n"
            "created_at 2026-10-19T08:30:00Z\n"
            "kb_version ffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffffff\n"
            "observation moon appears full 1 default\n"
            "observation soil_moisture is high 0.5 user\n");
  const auto rec = parse_session(serialize_session(s));
  EXPECT_EQ(rec.session, s);
  EXPECT_FALSE(rec.result_current);
  EXPECT_EQ(code_of([] { parse_session("dsage-session 9\n"); }), ErrorCode::parse_error);
  EXPECT_EQ(code_of([] { parse_session("garbage"); }), ErrorCode::parse_error);
}

TEST(FileStoreTest, SessionsRoundTrip) {
  testing::TempDir dir;
  FileStore store(dir.path());
  testing::Rng rng(100);
  std::vector<KnowledgeBase> kbs;
  std::vector<std::string> versions;
  for (int i = 0; i < 5; ++i) {
    kbs.push_back(testing::random_kb(rng, {.min_indicators = 2}));
    versions.push_back(store.put_kb(kbs.back()));
  }
  std::vector<Session> saved;
  for (int i = 0; i < 100; ++i) {
    const auto k = testing::pick(rng, 0, kbs.size() - 1);
    Session s = testing::random_session(rng, kbs[k], versions[k]);
    if (testing::coin(rng)) s = advise(std::move(s), kbs[k]).session;
    store.save_session(s);
    saved.push_back(s);
  }
  FileStore reopened(dir.path());
  EXPECT_EQ(reopened.session_ids().size(), saved.size());
  for (const auto& s : saved) {
    ASSERT_TRUE(reopened.has_session(s.id));
    EXPECT_EQ(reopened.load_session(s.id), s);
  }
}

}  // namespace
}  // namespace dsage
