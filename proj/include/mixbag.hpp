#pragma once

// Learning from label proportions with bag-level augmentation: bag
// generation, the MixBag operator with confidence-interval labels, the
// proportion and CI losses, a small differentiable classifier and the
// experiment harness.

#include "mixbag/bag.hpp"
#include "mixbag/data.hpp"
#include "mixbag/experiment.hpp"
#include "mixbag/io.hpp"
#include "mixbag/loss.hpp"
#include "mixbag/matrix.hpp"
#include "mixbag/mix.hpp"
#include "mixbag/model.hpp"
#include "mixbag/pca.hpp"
#include "mixbag/rng.hpp"
#include "mixbag/train.hpp"
