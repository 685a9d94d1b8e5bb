#include "gridsoccer/netspecs.hpp"

#include "gridsoccer/env.hpp"

namespace gridsoccer {

bool full_dqn_fits(int height, int width) {
  // 3x3/s1 twice then 4x4/s2.
  return height >= 8 && width >= 8;
}

bool full_coma_fits(int height, int width) {
  // 3x3/s1 then 4x4/s2.
  return height >= 6 && width >= 6;
}

NetworkSpec dqn_net_spec(int in_channels, int height, int width, int head_size,
                         bool small) {
  NetworkSpec spec;
  spec.input_shape = {in_channels, height, width};
  if (small) {
    spec.layers = {
        LayerSpec::conv(16, 3, 3, 1), LayerSpec::relu(),
        LayerSpec::flatten(),
        LayerSpec::dense(128),        LayerSpec::relu(),
        LayerSpec::dense(head_size),
    };
  } else {
    spec.layers = {
        LayerSpec::conv(32, 3, 3, 1), LayerSpec::relu(),
        LayerSpec::conv(64, 3, 3, 1), LayerSpec::relu(),
        LayerSpec::conv(64, 4, 4, 2), LayerSpec::relu(),
        LayerSpec::flatten(),
        LayerSpec::dense(256),        LayerSpec::relu(),
        LayerSpec::dense(head_size),
    };
  }
  return spec;
}

NetworkSpec policy_net_spec(int players_per_team, int height, int width,
                            bool small) {
  const int head = action_count(players_per_team);
  NetworkSpec spec;
  spec.input_shape = {4, height, width};
  if (small) {
    spec.layers = {
        LayerSpec::conv(16, 3, 3, 1), LayerSpec::relu(),
        LayerSpec::flatten(),         LayerSpec::concat_side(players_per_team),
        LayerSpec::dense(64),         LayerSpec::relu(),
        LayerSpec::dense(head),       LayerSpec::softmax(),
    };
  } else {
    spec.layers = {
        LayerSpec::conv(32, 3, 3, 1), LayerSpec::relu(),
        LayerSpec::conv(64, 4, 4, 2), LayerSpec::relu(),
        LayerSpec::flatten(),         LayerSpec::concat_side(players_per_team),
        LayerSpec::dense(128),        LayerSpec::relu(),
        LayerSpec::dense(64),         LayerSpec::relu(),
        LayerSpec::dense(head),       LayerSpec::softmax(),
    };
  }
  return spec;
}

int critic_side_dim(int players_per_team) {
  return (players_per_team - 1) * action_count(players_per_team) +
         players_per_team;
}

NetworkSpec critic_net_spec(int players_per_team, int height, int width,
                            bool small) {
  const int head = action_count(players_per_team);
  const int side = critic_side_dim(players_per_team);
  NetworkSpec spec;
  spec.input_shape = {players_per_team + 2, height, width};
  if (small) {
    spec.layers = {
        LayerSpec::conv(16, 3, 3, 1), LayerSpec::relu(),
        LayerSpec::flatten(),         LayerSpec::concat_side(side),
        LayerSpec::dense(64),         LayerSpec::relu(),
        LayerSpec::dense(head),
    };
  } else {
    spec.layers = {
        LayerSpec::conv(32, 3, 3, 1), LayerSpec::relu(),
        LayerSpec::conv(64, 4, 4, 2), LayerSpec::relu(),
        LayerSpec::flatten(),         LayerSpec::concat_side(side),
        LayerSpec::dense(128),        LayerSpec::relu(),
        LayerSpec::dense(64),         LayerSpec::relu(),
        LayerSpec::dense(head),
    };
  }
  return spec;
}

}  // namespace gridsoccer
