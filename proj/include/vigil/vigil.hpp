#pragma once

#include "vigil/corpus.hpp"
#include "vigil/textprep.hpp"
#include "vigil/vectorspace.hpp"
#include "vigil/classifier.hpp"
#include "vigil/topics.hpp"
#include "vigil/clusteranalysis.hpp"
#include "vigil/sweep.hpp"
#include "vigil/synth.hpp"
