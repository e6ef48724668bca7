#pragma once

#include "modhate/audio_features.hpp"
#include "modhate/classifiers.hpp"
#include "modhate/error.hpp"
#include "modhate/feature_selection.hpp"
#include "modhate/feature_table.hpp"
#include "modhate/fusion_eval.hpp"
#include "modhate/image_features.hpp"
#include "modhate/ingest.hpp"
#include "modhate/matrix.hpp"
#include "modhate/model.hpp"
#include "modhate/pipeline.hpp"
#include "modhate/random.hpp"
#include "modhate/synthetic.hpp"
#include "modhate/text_features.hpp"
#include "modhate/tree.hpp"
