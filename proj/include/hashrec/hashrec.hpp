#pragma once

#include "hashrec/cluster.hpp"
#include "hashrec/corpus.hpp"
#include "hashrec/error.hpp"
#include "hashrec/matcher.hpp"
#include "hashrec/pipeline.hpp"
#include "hashrec/profile.hpp"
#include "hashrec/recommend.hpp"
#include "hashrec/segmenter.hpp"
#include "hashrec/taxonomy.hpp"
