#include "doctest.h"
#include "gridsoccer/config.hpp"
#include "gridsoccer/errors.hpp"

using namespace gridsoccer;

TEST_CASE("key-value parsing with comments and strict keys") {
  KeyValueFile kv = KeyValueFile::parse_text(
      "# a comment\n"
      "alpha = 3   # trailing comment\n"
      "name = some/path.ckpt\n"
      "flag = true\n"
      "\n");
  CHECK(kv.get_int("alpha", 0) == 3);
  CHECK(kv.get_string("name", "") == "some/path.ckpt");
  CHECK(kv.get_bool("flag", false));
  CHECK(kv.get_double("missing", 2.5) == 2.5);
  kv.reject_unknown_keys();

  KeyValueFile unused = KeyValueFile::parse_text("mystery = 1\n");
  CHECK_THROWS_AS(unused.reject_unknown_keys(), ConfigError);
  CHECK_THROWS_AS(KeyValueFile::parse_text("not a pair\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueFile::parse_text("a = 1\na = 2\n"), ConfigError);
  KeyValueFile bad_int = KeyValueFile::parse_text("x = 3.5\n");
  CHECK_THROWS_AS(bad_int.get_int("x", 0), ConfigError);
}

TEST_CASE("train config round-trips through its text form") {
  TrainConfig c;
  c.env.height = 6;
  c.env.width = 9;
  c.env.players_per_team = 2;
  c.protocol = Protocol::Coordinated;
  c.opponent = "random";
  c.seed = 99;
  c.total_timesteps = 12345;
  c.lr = 0.0005;
  c.credit_mode = CreditMode::Ratio;
  c.comm_symbols = 2;
  c.trace_path = "trace.jsonl";
  const TrainConfig back = TrainConfig::from_text(c.to_text());
  CHECK(back.to_text() == c.to_text());
  CHECK(back.protocol == Protocol::Coordinated);
  CHECK(back.seed == 99);
  CHECK(back.credit_mode == CreditMode::Ratio);
  CHECK(back.trace_path == "trace.jsonl");
}

TEST_CASE("unknown config keys are rejected") {
  CHECK_THROWS_AS(TrainConfig::from_text("prtocol = paramshare\n"), ConfigError);
}

TEST_CASE("config validation catches bad values") {
  CHECK_THROWS_AS(TrainConfig::from_text("gamma = 1.0\n"), ConfigError);
  CHECK_THROWS_AS(TrainConfig::from_text("lr = 0\n"), ConfigError);
  CHECK_THROWS_AS(TrainConfig::from_text("minibatch_size = 100000\n"), ConfigError);
  CHECK_THROWS_AS(TrainConfig::from_text("protocol = dqn\n"), ConfigError);
  CHECK_THROWS_AS(TrainConfig::from_text("net = big\n"), ConfigError);
  CHECK_THROWS_AS(TrainConfig::from_text("env.height = 2\n"), ConfigError);
}

TEST_CASE("protocol names round trip") {
  for (Protocol p : {Protocol::Concurrent, Protocol::ParamShare,
                     Protocol::Coordinated, Protocol::Coma, Protocol::Handcoded,
                     Protocol::Random})
    CHECK(protocol_from_name(protocol_name(p)) == p);
}

TEST_CASE("auto net preset picks the full stack only when it fits") {
  TrainConfig big;  // 10x18 default
  CHECK_FALSE(big.net_is_small());
  TrainConfig small;
  small.env.height = 6;
  small.env.width = 9;
  small.env.players_per_team = 2;
  CHECK(small.net_is_small());
  TrainConfig coma = small;
  coma.protocol = Protocol::Coma;  // the two-conv stack fits on 6x9
  CHECK_FALSE(coma.net_is_small());
  TrainConfig forced = big;
  forced.net = NetPreset::Small;
  CHECK(forced.net_is_small());
}

TEST_CASE("encoder resolution follows the protocol") {
  TrainConfig c;
  CHECK(c.resolved_encoder() == EncoderKind::Basic);
  c.protocol = Protocol::Coordinated;
  CHECK(c.resolved_encoder() == EncoderKind::Comm);
  c.encoder = EncoderKind::Comm;
  c.protocol = Protocol::ParamShare;
  CHECK(c.resolved_encoder() == EncoderKind::Comm);
}
