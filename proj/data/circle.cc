{
  "generators": ["t"],
  "cells": {"0": ["v"], "1": ["e"]},
  "boundaries": {"1": [[[["+1", "t"], ["-1", ""]]]]}
}
