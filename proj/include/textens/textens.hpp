#pragma once

// Convenience umbrella header for the whole library.

#include "textens/archive.hpp"
#include "textens/class_probabilities.hpp"
#include "textens/dataset.hpp"
#include "textens/distance.hpp"
#include "textens/ensemble.hpp"
#include "textens/errors.hpp"
#include "textens/knn.hpp"
#include "textens/mlp.hpp"
#include "textens/naive_bayes.hpp"
#include "textens/partition.hpp"
#include "textens/random_forest.hpp"
#include "textens/rng.hpp"
#include "textens/svm.hpp"
#include "textens/synth.hpp"
#include "textens/text.hpp"
