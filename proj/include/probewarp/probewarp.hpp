#pragma once

#include "probewarp/ball_warp.hpp"
#include "probewarp/camera.hpp"
#include "probewarp/cli.hpp"
#include "probewarp/errors.hpp"
#include "probewarp/features.hpp"
#include "probewarp/image.hpp"
#include "probewarp/image_io.hpp"
#include "probewarp/optical_flow.hpp"
#include "probewarp/parallel.hpp"
#include "probewarp/pipeline.hpp"
#include "probewarp/registration.hpp"
#include "probewarp/rigid.hpp"
#include "probewarp/rng.hpp"
#include "probewarp/synth.hpp"
#include "probewarp/tracks.hpp"
#include "probewarp/transform_log.hpp"
