#pragma once

// Umbrella header for the voiceface library.

#include "voiceface/association.hpp"
#include "voiceface/config.hpp"
#include "voiceface/error.hpp"
#include "voiceface/eval_io.hpp"
#include "voiceface/evaluation.hpp"
#include "voiceface/faces.hpp"
#include "voiceface/feature_io.hpp"
#include "voiceface/frontend.hpp"
#include "voiceface/parallel.hpp"
#include "voiceface/pipeline.hpp"
#include "voiceface/rng.hpp"
#include "voiceface/speech_activity.hpp"
#include "voiceface/speech_clustering.hpp"
#include "voiceface/synthetic.hpp"
#include "voiceface/text_util.hpp"
#include "voiceface/timeline_io.hpp"
#include "voiceface/track_io.hpp"
#include "voiceface/types.hpp"
#include "voiceface/vec_math.hpp"
#include "voiceface/vlad.hpp"
#include "voiceface/wav_io.hpp"
