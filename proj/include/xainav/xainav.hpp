#pragma once
// Umbrella header. server.hpp is left out so that users who only need the
// simulation and attribution code do not pull in the HTTP library.

#include "xainav/geometry.hpp"
#include "xainav/lidar.hpp"
#include "xainav/world.hpp"
#include "xainav/mlp.hpp"
#include "xainav/policy.hpp"
#include "xainav/reward.hpp"
#include "xainav/env.hpp"
#include "xainav/scene_sampler.hpp"
#include "xainav/replay_buffer.hpp"
#include "xainav/td3.hpp"
#include "xainav/attribution.hpp"
#include "xainav/kendall.hpp"
#include "xainav/study.hpp"
#include "xainav/scene_io.hpp"
#include "xainav/protocol.hpp"
#include "xainav/session.hpp"
#include "xainav/export.hpp"
