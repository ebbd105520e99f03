// Copyright the rsum contributors.
// SPDX-License-Identifier: Apache-2.0

#include "rsum/cli.hpp"

int main(int argc, char** argv) { return rsum::run(argc, argv); }
