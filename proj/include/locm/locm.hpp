#pragma once

// Everything except the HTTP client, which pulls in httplib and OpenSSL TLS.

#include "locm/analytics.hpp"
#include "locm/complexity.hpp"
#include "locm/config.hpp"
#include "locm/corpus.hpp"
#include "locm/curriculum.hpp"
#include "locm/digest.hpp"
#include "locm/error.hpp"
#include "locm/eval/cache.hpp"
#include "locm/eval/client.hpp"
#include "locm/eval/extract.hpp"
#include "locm/eval/harness.hpp"
#include "locm/eval/prompt.hpp"
#include "locm/eval/simulated_client.hpp"
#include "locm/fol.hpp"
#include "locm/instance.hpp"
#include "locm/interval.hpp"
#include "locm/record.hpp"
#include "locm/report.hpp"
#include "locm/score.hpp"
#include "locm/simulator.hpp"
#include "locm/synthetic.hpp"
#include "locm/transition.hpp"
