# Curriculum Threshold Controllers
