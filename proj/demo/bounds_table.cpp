// Copyright 2026 The pwln-interp Authors
// SPDX-License-Identifier: Apache-2.0

// Prints the closed-form bound triples for a handful of architectures and
// the pairwise interpretability of each against a fixed reference model.
// Build and run:  ./demo_bounds_table

#include <cstdio>

#include "pwln/architecture.hpp"
#include "pwln/bounds.hpp"

int main() {
    const pwln::PwlnArchitecture reference =
        pwln::parse_architecture("n0=2;layers=8;c=3");
    const char* literals[] = {
        "n0=2;layers=8;c=3",
        "n0=2;layers=16,16;c=3",
        "n0=2;layers=64;c=3",
        "n0=2;layers=8,8,8;c=3",
    };

    std::printf("%-22s %28s %28s %6s\n", "architecture",
                "log2 complexity (lo/avg/hi)", "log2 entropy (lo/avg/hi)",
                "I(ref)");
    for (const char* literal : literals) {
        const pwln::PwlnArchitecture arch =
            pwln::parse_architecture(literal);
        const pwln::BoundTriple complexity = pwln::complexity_bounds(arch);
        const pwln::BoundTriple entropy = pwln::entropy_bounds(arch);
        // How interpretable the reference model is in terms of this one.
        const pwln::InterpretabilityBounds interp =
            pwln::interpretability_bounds(reference, arch);
        std::printf("%-22s %8.2f %9.2f %9.2f %8.2f %9.2f %9.2f %6.3f\n",
                    literal, complexity.lower.log2(),
                    complexity.average.log2(), complexity.upper.log2(),
                    entropy.lower.log2(), entropy.average.log2(),
                    entropy.upper.log2(), interp.average);
    }
    return 0;
}
